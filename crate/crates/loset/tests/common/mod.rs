//! Seeded random generators for signatures, finite interpretations, terms
//! and formulas, shared by the acceptance suite.

use std::collections::BTreeMap;

use loset::finset::{FinInterpretation, Value};
use loset::language::{Signature, Term, TypeExpr, Var};
use loset::sugar;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Seed for every randomized suite; override with LOSET_SEED.
pub fn seed() -> u64 {
    std::env::var("LOSET_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0xA11CE)
}

pub fn rng_for(label: &str) -> StdRng {
    let mut s = seed();
    for b in label.bytes() {
        s = s.wrapping_mul(0x100000001b3).wrapping_add(b as u64);
    }
    StdRng::seed_from_u64(s)
}

pub struct ModelGen {
    pub rng: StdRng,
}

fn type_pool() -> Vec<TypeExpr> {
    vec![
        TypeExpr::ground("A"),
        TypeExpr::ground("B"),
        TypeExpr::One,
        TypeExpr::Omega,
        TypeExpr::product(vec![TypeExpr::ground("A"), TypeExpr::ground("B")]),
        TypeExpr::power(TypeExpr::ground("A")),
    ]
}

impl ModelGen {
    pub fn new(label: &str) -> Self {
        ModelGen {
            rng: rng_for(label),
        }
    }

    /// A small signature over grounds A, B with a random stock of function
    /// symbols.
    pub fn signature(&mut self) -> Signature {
        let pool = type_pool();
        let mut fns = Vec::new();
        let n = self.rng.gen_range(0..=3);
        for i in 0..n {
            let arg = pool[self.rng.gen_range(0..pool.len())].clone();
            let res = pool[self.rng.gen_range(0..pool.len())].clone();
            fns.push((format!("f{i}"), arg, res));
        }
        Signature::new(vec!["A".into(), "B".into()], fns, false).unwrap()
    }

    /// A random interpretation: ground carriers of size <= 3, total random
    /// tables.
    pub fn interp_for(&mut self, sig: &Signature) -> FinInterpretation {
        let mut sizes = BTreeMap::new();
        for g in sig.grounds() {
            sizes.insert(g.clone(), self.rng.gen_range(1..=3usize));
        }
        // Carriers are needed to fill tables; use a function-free skeleton.
        let bare = Signature::new(sig.grounds().to_vec(), vec![], false).unwrap();
        let skeleton = FinInterpretation::new(bare, sizes.clone(), BTreeMap::new()).unwrap();
        let mut tables = BTreeMap::new();
        for (name, (arg, res)) in sig.fns() {
            let dom = skeleton.carrier(arg).unwrap();
            let cod = skeleton.carrier(res).unwrap();
            assert!(!cod.is_empty(), "carrier sizes are at least 1");
            let table: Vec<Value> = (0..dom.len())
                .map(|_| cod.values[self.rng.gen_range(0..cod.len())].clone())
                .collect();
            tables.insert(name.clone(), table);
        }
        FinInterpretation::new(sig.clone(), sizes, tables).unwrap()
    }

    /// The fixed variable pool used by generated formulas; types are kept
    /// small so validity enumeration stays cheap.
    pub fn var_pool() -> Vec<Var> {
        vec![
            Var::new("x", TypeExpr::ground("A")),
            Var::new("x2", TypeExpr::ground("A")),
            Var::new("y", TypeExpr::ground("B")),
            Var::new("w", TypeExpr::Omega),
            Var::new("s", TypeExpr::power(TypeExpr::ground("A"))),
        ]
    }

    fn var_of(&mut self, ty: &TypeExpr) -> Option<Var> {
        let candidates: Vec<Var> = Self::var_pool()
            .into_iter()
            .filter(|v| &v.ty == ty)
            .collect();
        if candidates.is_empty() {
            None
        } else {
            Some(candidates[self.rng.gen_range(0..candidates.len())].clone())
        }
    }

    /// A random term of the given type over the pool.
    pub fn term_of(&mut self, sig: &Signature, ty: &TypeExpr, depth: usize) -> Term {
        // Prefer an application when some symbol produces this type.
        if depth > 0 && self.rng.gen_bool(0.4) {
            let producers: Vec<(String, TypeExpr)> = sig
                .fns()
                .filter(|(_, (_, res))| res == ty)
                .map(|(n, (arg, _))| (n.clone(), arg.clone()))
                .collect();
            if !producers.is_empty() {
                let (name, arg_ty) = producers[self.rng.gen_range(0..producers.len())].clone();
                let arg = self.term_of(sig, &arg_ty, depth - 1);
                return sig.app(&name, arg).unwrap();
            }
        }
        match ty {
            TypeExpr::One => Term::star(),
            TypeExpr::Omega => {
                if depth == 0 {
                    if self.rng.gen_bool(0.5) {
                        sugar::tru()
                    } else {
                        Term::var(Var::new("w", TypeExpr::Omega))
                    }
                } else {
                    self.formula(sig, depth)
                }
            }
            TypeExpr::Product(fs) => Term::tuple(
                fs.iter()
                    .map(|f| self.term_of(sig, f, depth.saturating_sub(1)))
                    .collect(),
            ),
            TypeExpr::Power(inner) => {
                if depth == 0 {
                    match self.rng.gen_range(0..3) {
                        0 => sugar::universal_set((**inner).clone()),
                        1 => sugar::empty_set((**inner).clone()),
                        _ => self
                            .var_of(ty)
                            .map(Term::var)
                            .unwrap_or_else(|| sugar::universal_set((**inner).clone())),
                    }
                } else {
                    let x = Var::new("q", (**inner).clone());
                    let mut body = self.formula(sig, depth - 1);
                    // Mention the bound variable half the time.
                    if self.rng.gen_bool(0.5) {
                        let refl = Term::eq(Term::var(x.clone()), Term::var(x.clone())).unwrap();
                        body = sugar::and(body, refl).unwrap();
                    }
                    Term::compr(x, body).unwrap()
                }
            }
            TypeExpr::Ground(_) => self.var_of(ty).map(Term::var).unwrap_or_else(|| {
                // No pool variable of this ground: fall back to a fresh one.
                Term::var(Var::new("x", ty.clone()))
            }),
        }
    }

    /// A random formula over the pool, with connective and quantifier depth
    /// bounded by `depth`.
    pub fn formula(&mut self, sig: &Signature, depth: usize) -> Term {
        if depth == 0 {
            return self.atom(sig);
        }
        match self.rng.gen_range(0..9) {
            0 => self.atom(sig),
            1 => sugar::and(self.formula(sig, depth - 1), self.formula(sig, depth - 1)).unwrap(),
            2 => sugar::or(self.formula(sig, depth - 1), self.formula(sig, depth - 1)).unwrap(),
            3 => sugar::implies(self.formula(sig, depth - 1), self.formula(sig, depth - 1))
                .unwrap(),
            4 => sugar::not(self.formula(sig, depth - 1)).unwrap(),
            5 => sugar::iff(self.formula(sig, depth - 1), self.formula(sig, depth - 1)).unwrap(),
            6 => {
                let v = match self.rng.gen_range(0..3) {
                    0 => Var::new("x", TypeExpr::ground("A")),
                    1 => Var::new("y", TypeExpr::ground("B")),
                    _ => Var::new("w", TypeExpr::Omega),
                };
                sugar::forall(v, self.formula(sig, depth - 1)).unwrap()
            }
            7 => {
                let v = if self.rng.gen_bool(0.5) {
                    Var::new("x", TypeExpr::ground("A"))
                } else {
                    Var::new("y", TypeExpr::ground("B"))
                };
                sugar::exists(v, self.formula(sig, depth - 1)).unwrap()
            }
            _ => {
                let ty = TypeExpr::ground(if self.rng.gen_bool(0.5) { "A" } else { "B" });
                Term::eq(self.term_of(sig, &ty, 1), self.term_of(sig, &ty, 1)).unwrap()
            }
        }
    }

    fn atom(&mut self, sig: &Signature) -> Term {
        match self.rng.gen_range(0..6) {
            0 => sugar::tru(),
            1 => sugar::fls(),
            2 => Term::var(Var::new("w", TypeExpr::Omega)),
            3 => {
                let ty = TypeExpr::ground(if self.rng.gen_bool(0.5) { "A" } else { "B" });
                Term::eq(self.term_of(sig, &ty, 1), self.term_of(sig, &ty, 1)).unwrap()
            }
            4 => {
                let elem = self.term_of(sig, &TypeExpr::ground("A"), 1);
                let set = self.term_of(sig, &TypeExpr::power(TypeExpr::ground("A")), 1);
                Term::mem(elem, set).unwrap()
            }
            _ => {
                // An Omega-valued application when one exists.
                let omegas: Vec<(String, TypeExpr)> = sig
                    .fns()
                    .filter(|(_, (_, res))| **res == TypeExpr::Omega)
                    .map(|(n, (arg, _))| (n.clone(), arg.clone()))
                    .collect();
                if omegas.is_empty() {
                    sugar::tru()
                } else {
                    let (name, arg_ty) = omegas[self.rng.gen_range(0..omegas.len())].clone();
                    let arg = self.term_of(sig, &arg_ty, 1);
                    sig.app(&name, arg).unwrap()
                }
            }
        }
    }
}
