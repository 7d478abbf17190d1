//! L-sets, S-functions as graph triples, composition, term-representable
//! functions, and the lift of a truth-valued function back to a formula.
//!
//! An S-set is an equivalence class of L-sets under provable equality; the
//! artifact always works with a chosen representative term and tests
//! equality semantically (`sset_eq`), never syntactically. Validation of
//! S-functions follows the totality / single-valuedness split so each
//! failure gets its own error.

use crate::error::{Error, Result};
use crate::finset::FinInterpretation;
use crate::language::{fresh_var, Term, TypeExpr, Var};
use crate::sugar;

/// A closed term of power type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LSet {
    term: Term,
}

impl LSet {
    pub fn new(term: Term) -> Result<Self> {
        if !term.is_closed() {
            return Err(Error::TypeMismatch(format!(
                "an L-set must be closed; free variables: {:?}",
                term.free_vars()
            )));
        }
        if !term.ty().is_power() {
            return Err(Error::TypeMismatch(format!(
                "an L-set must have power type, got {}",
                term.ty()
            )));
        }
        Ok(LSet { term })
    }

    pub fn universal(ty: TypeExpr) -> Self {
        LSet {
            term: sugar::universal_set(ty),
        }
    }

    pub fn empty(ty: TypeExpr) -> Self {
        LSet {
            term: sugar::empty_set(ty),
        }
    }

    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn elem_ty(&self) -> &TypeExpr {
        self.term.ty().as_power().expect("checked at construction")
    }

    /// True when the chosen representative is literally a universal set.
    pub fn is_universal_form(&self) -> bool {
        sugar::match_universal(&self.term).is_some()
    }
}

/// Provable (here: semantic) equality of S-sets: `⊢ X = Y`.
pub fn sset_eq(interp: &FinInterpretation, x: &LSet, y: &LSet) -> Result<bool> {
    if x.term.ty() != y.term.ty() {
        return Err(Error::TypeMismatch(format!(
            "S-set equality requires one power type, got {} and {}",
            x.term.ty(),
            y.term.ty()
        )));
    }
    interp.th_entails(&[], &Term::eq(x.term.clone(), y.term.clone())?)
}

/// An S-function: a graph together with domain and codomain S-sets.
#[derive(Clone, Debug)]
pub struct SFunction {
    graph: LSet,
    dom: LSet,
    cod: LSet,
}

impl SFunction {
    /// Wraps a triple without semantic validation; callers must have
    /// established functionality (e.g. graphs produced by [`represent`]).
    pub fn new_unchecked(graph: LSet, dom: LSet, cod: LSet) -> Result<Self> {
        let expected = TypeExpr::power(TypeExpr::product(vec![
            dom.elem_ty().clone(),
            cod.elem_ty().clone(),
        ]));
        if graph.term.ty() != &expected {
            return Err(Error::TypeMismatch(format!(
                "graph has type {}, expected {expected}",
                graph.term.ty()
            )));
        }
        Ok(SFunction { graph, dom, cod })
    }

    pub fn graph(&self) -> &LSet {
        &self.graph
    }

    pub fn dom(&self) -> &LSet {
        &self.dom
    }

    pub fn cod(&self) -> &LSet {
        &self.cod
    }

    /// `⟨a,b⟩ ∈ |f|`.
    pub fn pair_in_graph(&self, a: Term, b: Term) -> Result<Term> {
        Term::mem(Term::tuple(vec![a, b]), self.graph.term.clone())
    }
}

fn fresh_pair(f_graph: &Term, dom_ty: &TypeExpr, cod_ty: &TypeExpr) -> (Var, Var) {
    let avoid = crate::language::all_names(&[f_graph]);
    let x = fresh_var("x", dom_ty.clone(), &avoid);
    let y = fresh_var("y", cod_ty.clone(), &avoid);
    (x, y)
}

/// Validates the triple `(graph, X, Y)` as an S-function using the
/// two-part criterion: the graph lies inside `X × Y`, is total over `X`,
/// and is single-valued.
pub fn mk_sfunction(
    interp: &FinInterpretation,
    graph: LSet,
    dom: LSet,
    cod: LSet,
) -> Result<SFunction> {
    let f = SFunction::new_unchecked(graph, dom, cod)?;
    let product = sugar::set_product(f.dom.term.clone(), f.cod.term.clone())?;
    let sub = sugar::subset(f.graph.term.clone(), product)?;
    if !interp.th_entails(&[], &sub)? {
        return Err(Error::NotSubgraph(format!("{}", f.graph.term)));
    }
    let (x, y) = fresh_pair(&f.graph.term, f.dom.elem_ty(), f.cod.elem_ty());
    let total = {
        let hyp = Term::mem(Term::var(x.clone()), f.dom.term.clone())?;
        let body = f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?;
        let concl = sugar::exists_in(y.clone(), f.cod.term.clone(), body)?;
        interp.th_entails(&[hyp], &concl)?
    };
    if !total {
        return Err(Error::NotTotal(format!("{}", f.graph.term)));
    }
    let single = {
        let y2 = fresh_var(
            "y",
            f.cod.elem_ty().clone(),
            &crate::language::all_names(&[&f.graph.term]),
        );
        let h1 = f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?;
        let h2 = f.pair_in_graph(Term::var(x.clone()), Term::var(y2.clone()))?;
        let concl = Term::eq(Term::var(y.clone()), Term::var(y2))?;
        interp.th_entails(&[h1, h2], &concl)?
    };
    if !single {
        return Err(Error::NotSingleValued(format!("{}", f.graph.term)));
    }
    Ok(f)
}

/// The graph of a term-defined map `(⟨x₁,…,xₙ⟩ ↦ τ)` over `X` into `Y`.
/// Such a graph is total and single-valued by construction; the checkable
/// precondition is `⟨x⟩∈X ⊢ τ∈Y`.
pub fn represent(
    interp: &FinInterpretation,
    vars: &[Var],
    body: Term,
    dom: &LSet,
    cod: &LSet,
) -> Result<SFunction> {
    if vars.is_empty() {
        return Err(Error::ArityError(
            "represent needs at least one variable".into(),
        ));
    }
    if !body.free_vars().iter().all(|v| vars.contains(v)) {
        return Err(Error::VariableClash(format!(
            "free variables of `{body}` must be among the given variables"
        )));
    }
    let tuple = Term::tuple(vars.iter().map(|v| Term::var(v.clone())).collect());
    if tuple.ty() != dom.elem_ty() {
        return Err(Error::TypeMismatch(format!(
            "⟨x₁,…,xₙ⟩ has type {}, domain elements have type {}",
            tuple.ty(),
            dom.elem_ty()
        )));
    }
    let hyp = Term::mem(tuple, dom.term().clone())?;
    let landing = Term::mem(body.clone(), cod.term().clone())?;
    if !interp.th_entails(&[hyp], &landing)? {
        return Err(Error::NotInCodomain(format!("{body}")));
    }
    let graph = sugar::graph_pair(vars, body, dom.term().clone())?;
    SFunction::new_unchecked(LSet::new(graph)?, dom.clone(), cod.clone())
}

/// The identity `(x ↦ x) : X → X`.
pub fn identity(interp: &FinInterpretation, x_set: &LSet) -> Result<SFunction> {
    let v = fresh_var(
        "x",
        x_set.elem_ty().clone(),
        &crate::language::all_names(&[x_set.term()]),
    );
    represent(interp, &[v.clone()], Term::var(v), x_set, x_set)
}

/// The inclusion `i_X = (x ↦ x) : X → U_A`.
pub fn inclusion(interp: &FinInterpretation, x_set: &LSet) -> Result<SFunction> {
    let universal = LSet::universal(x_set.elem_ty().clone());
    let v = fresh_var(
        "x",
        x_set.elem_ty().clone(),
        &crate::language::all_names(&[x_set.term()]),
    );
    represent(interp, &[v.clone()], Term::var(v), x_set, &universal)
}

/// The constantly-true function `T_X : X → Ω`.
pub fn t_x(interp: &FinInterpretation, x_set: &LSet) -> Result<SFunction> {
    let omega = LSet::universal(TypeExpr::Omega);
    let v = fresh_var(
        "x",
        x_set.elem_ty().clone(),
        &crate::language::all_names(&[x_set.term()]),
    );
    represent(interp, &[v], sugar::tru(), x_set, &omega)
}

fn compose_graph(g: &SFunction, f: &SFunction) -> Result<LSet> {
    let avoid = crate::language::all_names(&[f.graph.term(), g.graph.term()]);
    let x = fresh_var("x", f.dom.elem_ty().clone(), &avoid);
    let y = fresh_var("y", f.cod.elem_ty().clone(), &avoid);
    let z = fresh_var("z", g.cod.elem_ty().clone(), &avoid);
    let inner = sugar::and(
        f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?,
        g.pair_in_graph(Term::var(y.clone()), Term::var(z.clone()))?,
    )?;
    let body = sugar::exists(y, inner)?;
    let pair = Term::tuple(vec![Term::var(x.clone()), Term::var(z.clone())]);
    LSet::new(sugar::image_set(&[x, z], pair, body)?)
}

/// Composition `g ∘ f` through the defining graph
/// `{⟨x,z⟩ : ∃y(⟨x,y⟩∈f ∧ ⟨y,z⟩∈g)}`, revalidated.
pub fn compose(interp: &FinInterpretation, g: &SFunction, f: &SFunction) -> Result<SFunction> {
    if f.cod.elem_ty() != g.dom.elem_ty() {
        return Err(Error::TypeMismatch(format!(
            "cannot compose: cod elements {} vs dom elements {}",
            f.cod.elem_ty(),
            g.dom.elem_ty()
        )));
    }
    if !sset_eq(interp, &f.cod, &g.dom)? {
        return Err(Error::TypeMismatch(
            "cannot compose: cod(f) is not provably equal to dom(g)".into(),
        ));
    }
    let graph = compose_graph(g, f)?;
    mk_sfunction(interp, graph, f.dom.clone(), g.cod.clone())
}

/// Composition without revalidation, for pipelines whose pieces are
/// already-validated functions with definitionally matching sets.
pub fn compose_unchecked(g: &SFunction, f: &SFunction) -> Result<SFunction> {
    let graph = compose_graph(g, f)?;
    SFunction::new_unchecked(graph, f.dom.clone(), g.cod.clone())
}

/// The flat n-ary product `f₁ × ⋯ × fₙ` between product sets.
pub fn product_fn(fs: &[SFunction]) -> Result<SFunction> {
    if fs.len() < 2 {
        return Err(Error::ArityError(
            "product of functions needs at least two components".into(),
        ));
    }
    let dom_sets: Vec<Term> = fs.iter().map(|f| f.dom.term().clone()).collect();
    let cod_sets: Vec<Term> = fs.iter().map(|f| f.cod.term().clone()).collect();
    let dom = LSet::new(sugar::set_product_n(&dom_sets)?)?;
    let cod = LSet::new(sugar::set_product_n(&cod_sets)?)?;
    let refs: Vec<&Term> = fs.iter().map(|f| f.graph.term()).collect();
    let avoid = crate::language::all_names(&refs);
    let p = fresh_var("p", dom.elem_ty().clone(), &avoid);
    let q = fresh_var("q", cod.elem_ty().clone(), &avoid);
    let mut body: Option<Term> = None;
    for (i, f) in fs.iter().enumerate() {
        let part = f.pair_in_graph(
            Term::proj(i + 1, Term::var(p.clone()))?,
            Term::proj(i + 1, Term::var(q.clone()))?,
        )?;
        body = Some(match body {
            None => part,
            Some(acc) => sugar::and(acc, part)?,
        });
    }
    let pair = Term::tuple(vec![Term::var(p.clone()), Term::var(q.clone())]);
    let graph = sugar::image_set(&[p, q], pair, body.unwrap())?;
    SFunction::new_unchecked(LSet::new(graph)?, dom, cod)
}

/// Extensional equality of parallel S-functions:
/// `x∈X ⊢ ⟨x,y⟩∈|f| ⇔ ⟨x,y⟩∈|g|`.
pub fn extensional_eq(interp: &FinInterpretation, f: &SFunction, g: &SFunction) -> Result<bool> {
    if f.dom.elem_ty() != g.dom.elem_ty() || f.cod.elem_ty() != g.cod.elem_ty() {
        return Err(Error::TypeMismatch(
            "extensional equality requires parallel functions".into(),
        ));
    }
    if !sset_eq(interp, &f.dom, &g.dom)? {
        return Ok(false);
    }
    let avoid = crate::language::all_names(&[f.graph.term(), g.graph.term()]);
    let x = fresh_var("x", f.dom.elem_ty().clone(), &avoid);
    let y = fresh_var("y", f.cod.elem_ty().clone(), &avoid);
    let hyp = Term::mem(Term::var(x.clone()), f.dom.term().clone())?;
    let lhs = f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?;
    let rhs = g.pair_in_graph(Term::var(x), Term::var(y))?;
    interp.th_entails(&[hyp], &sugar::iff(lhs, rhs)?)
}

pub fn is_injective(interp: &FinInterpretation, f: &SFunction) -> Result<bool> {
    let avoid = crate::language::all_names(&[f.graph.term()]);
    let x1 = fresh_var("x", f.dom.elem_ty().clone(), &avoid);
    let x2 = fresh_var("x", f.dom.elem_ty().clone(), &avoid);
    let y = fresh_var("y", f.cod.elem_ty().clone(), &avoid);
    let h1 = f.pair_in_graph(Term::var(x1.clone()), Term::var(y.clone()))?;
    let h2 = f.pair_in_graph(Term::var(x2.clone()), Term::var(y))?;
    interp.th_entails(&[h1, h2], &Term::eq(Term::var(x1), Term::var(x2))?)
}

pub fn is_surjective(interp: &FinInterpretation, f: &SFunction) -> Result<bool> {
    let avoid = crate::language::all_names(&[f.graph.term(), f.cod.term()]);
    let x = fresh_var("x", f.dom.elem_ty().clone(), &avoid);
    let y = fresh_var("y", f.cod.elem_ty().clone(), &avoid);
    let hyp = Term::mem(Term::var(y.clone()), f.cod.term().clone())?;
    let body = f.pair_in_graph(Term::var(x.clone()), Term::var(y))?;
    let concl = sugar::exists_in(x, f.dom.term().clone(), body)?;
    interp.th_entails(&[hyp], &concl)
}

pub fn is_bijection(interp: &FinInterpretation, f: &SFunction) -> Result<bool> {
    Ok(is_injective(interp, f)? && is_surjective(interp, f)?)
}

/// The inverse of a bijection, stored as the syntactic inverse graph
/// `{⟨y,x⟩ : ⟨x,y⟩∈|f|}`.
pub fn inverse(interp: &FinInterpretation, f: &SFunction) -> Result<SFunction> {
    if !is_bijection(interp, f)? {
        return Err(Error::side_condition("inverse", "f is a bijection"));
    }
    let avoid = crate::language::all_names(&[f.graph.term()]);
    let x = fresh_var("x", f.dom.elem_ty().clone(), &avoid);
    let y = fresh_var("y", f.cod.elem_ty().clone(), &avoid);
    let body = f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?;
    let pair = Term::tuple(vec![Term::var(y.clone()), Term::var(x.clone())]);
    let graph = sugar::image_set(&[y, x], pair, body)?;
    SFunction::new_unchecked(LSet::new(graph)?, f.cod.clone(), f.dom.clone())
}

/// `f^♮(x) := ⟨x, true⟩ ∈ |f|` for a truth-valued function, with x fresh.
pub fn natural(f: &SFunction) -> Result<(Var, Term)> {
    if f.cod.elem_ty() != &TypeExpr::Omega || !f.cod.is_universal_form() {
        return Err(Error::TypeMismatch(format!(
            "natural requires codomain U_Omega, got {}",
            f.cod.term()
        )));
    }
    let x = fresh_var(
        "x",
        f.dom.elem_ty().clone(),
        &crate::language::all_names(&[f.graph.term()]),
    );
    let formula = natural_at(f, Term::var(x.clone()))?;
    Ok((x, formula))
}

/// `f^♮` applied to a given argument term.
pub fn natural_at(f: &SFunction, arg: Term) -> Result<Term> {
    f.pair_in_graph(arg, sugar::tru())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finset::Value;
    use crate::language::Signature;
    use std::collections::BTreeMap;

    fn interp_a(n: usize) -> FinInterpretation {
        let sig = Signature::new(vec!["A".into()], vec![], false).unwrap();
        let mut sizes = BTreeMap::new();
        sizes.insert("A".to_string(), n);
        FinInterpretation::new(sig, sizes, BTreeMap::new()).unwrap()
    }

    fn ty_a() -> TypeExpr {
        TypeExpr::ground("A")
    }

    fn refl_set() -> LSet {
        let x = Var::new("x", ty_a());
        LSet::new(
            Term::compr(
                x.clone(),
                Term::eq(Term::var(x.clone()), Term::var(x)).unwrap(),
            )
            .unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn sset_eq_examples() {
        let interp = interp_a(2);
        let u = LSet::universal(ty_a());
        // {x:true} vs {x : x=x}
        assert!(sset_eq(&interp, &u, &refl_set()).unwrap());
        // {x:false} vs U_A with |A| >= 1
        assert!(!sset_eq(&interp, &LSet::empty(ty_a()), &u).unwrap());
        // {x : α∧β} vs {x : β∧α}
        let x = Var::new("x", ty_a());
        let s = sugar::singleton(Term::var(x.clone()));
        let alpha = Term::mem(Term::var(x.clone()), s).unwrap();
        let beta = Term::eq(Term::var(x.clone()), Term::var(x.clone())).unwrap();
        let ab = LSet::new(
            Term::compr(x.clone(), sugar::and(alpha.clone(), beta.clone()).unwrap()).unwrap(),
        )
        .unwrap();
        let ba = LSet::new(Term::compr(x, sugar::and(beta, alpha).unwrap()).unwrap()).unwrap();
        assert!(sset_eq(&interp, &ab, &ba).unwrap());
    }

    #[test]
    fn lset_requires_closed_power_terms() {
        let open = Term::var(Var::new("s", TypeExpr::power(ty_a())));
        assert!(LSet::new(open).is_err());
        let not_power = Term::star();
        assert!(LSet::new(not_power).is_err());
    }

    #[test]
    fn identity_graph_is_a_function() {
        let interp = interp_a(3);
        let u = LSet::universal(ty_a());
        let id = identity(&interp, &u).unwrap();
        let checked = mk_sfunction(
            &interp,
            id.graph().clone(),
            id.dom().clone(),
            id.cod().clone(),
        );
        assert!(checked.is_ok());
    }

    #[test]
    fn totality_and_single_valuedness_failures() {
        let interp = interp_a(2);
        let u = LSet::universal(ty_a());
        // Empty graph over a nonempty domain: not total.
        let empty_graph = LSet::empty(TypeExpr::product(vec![ty_a(), ty_a()]));
        let err = mk_sfunction(&interp, empty_graph, u.clone(), u.clone()).unwrap_err();
        assert!(matches!(err, Error::NotTotal(_)));
        // Full product graph with |A| = 2: relates each x to two outputs.
        let full = LSet::universal(TypeExpr::product(vec![ty_a(), ty_a()]));
        let err = mk_sfunction(&interp, full, u.clone(), u.clone()).unwrap_err();
        assert!(matches!(err, Error::NotSingleValued(_)));
        // Full graph against an empty domain: not even a subgraph.
        let full = LSet::universal(TypeExpr::product(vec![ty_a(), ty_a()]));
        let err = mk_sfunction(&interp, full, LSet::empty(ty_a()), u).unwrap_err();
        assert!(matches!(err, Error::NotSubgraph(_)));
    }

    #[test]
    fn composition_of_symbol_functions() {
        // f : A -> B and g : B -> C backed by tables; |A|=|B|=|C|=1 gives
        // the f={(a,b)}, g={(b,c)} -> {(a,c)} case, computed by evaluating
        // the defining formula over all pairs.
        let sig = Signature::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![
                ("f".into(), TypeExpr::ground("A"), TypeExpr::ground("B")),
                ("g".into(), TypeExpr::ground("B"), TypeExpr::ground("C")),
            ],
            false,
        )
        .unwrap();
        let mut sizes = BTreeMap::new();
        sizes.insert("A".into(), 1);
        sizes.insert("B".into(), 1);
        sizes.insert("C".into(), 1);
        let mut tables = BTreeMap::new();
        tables.insert("f".into(), vec![Value::Atom(1, 0)]);
        tables.insert("g".into(), vec![Value::Atom(2, 0)]);
        let interp = FinInterpretation::new(sig.clone(), sizes, tables).unwrap();

        let ua = LSet::universal(TypeExpr::ground("A"));
        let ub = LSet::universal(TypeExpr::ground("B"));
        let uc = LSet::universal(TypeExpr::ground("C"));
        let xa = Var::new("x", TypeExpr::ground("A"));
        let xb = Var::new("x", TypeExpr::ground("B"));
        let f = represent(
            &interp,
            &[xa.clone()],
            sig.app("f", Term::var(xa)).unwrap(),
            &ua,
            &ub,
        )
        .unwrap();
        let g = represent(
            &interp,
            &[xb.clone()],
            sig.app("g", Term::var(xb)).unwrap(),
            &ub,
            &uc,
        )
        .unwrap();
        let gf = compose(&interp, &g, &f).unwrap();
        let graph_value = interp.eval_closed(gf.graph().term()).unwrap();
        assert_eq!(
            graph_value,
            Value::Set(vec![Value::Tuple(vec![
                Value::Atom(0, 0),
                Value::Atom(2, 0)
            ])])
        );
        // compose(id, f) extensionally equals f.
        let id_b = identity(&interp, &ub).unwrap();
        let idf = compose(&interp, &id_b, &f).unwrap();
        assert!(extensional_eq(&interp, &idf, &f).unwrap());
    }

    #[test]
    fn represent_examples() {
        let interp = interp_a(2);
        let u = LSet::universal(ty_a());
        let x = Var::new("x", ty_a());
        // Inclusion i_X for X = {x : x=x} is extensionally the identity.
        let inc = inclusion(&interp, &refl_set()).unwrap();
        assert!(extensional_eq(&interp, &inc, &identity(&interp, &u).unwrap()).unwrap());
        // Constant-to-* function.
        let one = LSet::universal(TypeExpr::One);
        let c = represent(&interp, &[x.clone()], Term::star(), &u, &one).unwrap();
        assert!(mk_sfunction(
            &interp,
            c.graph().clone(),
            c.dom().clone(),
            c.cod().clone()
        )
        .is_ok());
        // Landing outside the codomain is reported.
        let empty = LSet::empty(TypeExpr::One);
        let err = represent(&interp, &[x], Term::star(), &u, &empty).unwrap_err();
        assert!(matches!(err, Error::NotInCodomain(_)));
    }

    #[test]
    fn natural_recovers_formulas() {
        // Prop. 3.16.4(ii): ⊢ (⟨x⟩↦α)^♮(⟨x⟩) ⇔ α.
        let interp = interp_a(3);
        let u = LSet::universal(ty_a());
        let omega = LSet::universal(TypeExpr::Omega);
        let x = Var::new("x", ty_a());
        let alpha = Term::mem(Term::var(x.clone()), refl_set().term().clone()).unwrap();
        let f = represent(&interp, &[x.clone()], alpha.clone(), &u, &omega).unwrap();
        let applied = natural_at(&f, Term::var(x)).unwrap();
        assert!(interp
            .th_entails(&[], &sugar::iff(applied, alpha).unwrap())
            .unwrap());
        // Prop. 3.16.4(i): (x ↦ f^♮(x)) = f.
        let (nx, nf) = natural(&f).unwrap();
        let again = represent(&interp, &[nx], nf, &u, &omega).unwrap();
        assert!(extensional_eq(&interp, &again, &f).unwrap());
    }

    #[test]
    fn t_x_properties() {
        let interp = interp_a(2);
        let xset = refl_set();
        let t = t_x(&interp, &xset).unwrap();
        // natural(T_X) is semantically x∈X.
        let (nx, nf) = natural(&t).unwrap();
        let mem = Term::mem(Term::var(nx), xset.term().clone()).unwrap();
        assert!(interp
            .th_entails(&[], &sugar::iff(nf, mem).unwrap())
            .unwrap());
        // T on the empty set is the empty function, vacuously total.
        let t_empty = t_x(&interp, &LSet::empty(ty_a())).unwrap();
        assert!(mk_sfunction(
            &interp,
            t_empty.graph().clone(),
            t_empty.dom().clone(),
            t_empty.cod().clone()
        )
        .is_ok());
    }

    #[test]
    fn inverse_of_bijection() {
        let interp = interp_a(2);
        let u = LSet::universal(ty_a());
        let id = identity(&interp, &u).unwrap();
        assert!(is_bijection(&interp, &id).unwrap());
        let inv = inverse(&interp, &id).unwrap();
        assert!(extensional_eq(&interp, &inv, &id).unwrap());
        // A constant function into Omega is not injective over |A| = 2.
        let constant = represent(
            &interp,
            &[Var::new("x", ty_a())],
            sugar::tru(),
            &u,
            &LSet::universal(TypeExpr::Omega),
        )
        .unwrap();
        assert!(!is_injective(&interp, &constant).unwrap());
        assert!(inverse(&interp, &constant).is_err());
    }

    #[test]
    fn composition_is_associative_at_desk_scale() {
        let interp = interp_a(2);
        let u = LSet::universal(ty_a());
        let id = identity(&interp, &u).unwrap();
        let f = inverse(&interp, &id).unwrap();
        let left = compose(
            &interp,
            &compose(&interp, &id, &f).unwrap(),
            &id,
        )
        .unwrap();
        let right = compose(
            &interp,
            &id,
            &compose(&interp, &f, &id).unwrap(),
        )
        .unwrap();
        assert!(extensional_eq(&interp, &left, &right).unwrap());
    }
}
