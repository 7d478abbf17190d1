//! Signatures, type expressions, and the nine term formers of a local
//! language, with typing, free/bound analysis, capture handling and
//! α-equivalence.
//!
//! The sole binder is comprehension `{x : α}`, so every binding question
//! reduces to how `Compr` nodes are traversed. Terms are immutable and
//! shared (`Arc`), and every node caches its type and free-variable set.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Monotone counter backing fresh-variable generation.
static FRESH_COUNTER: AtomicU64 = AtomicU64::new(0);

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// A type symbol of a local language.
///
/// `Product` always has at least two factors and `Power` nests freely; the
/// `n = 1` / `n = 0` provisos are applied by [`TypeExpr::product`] so the
/// degenerate cases never appear in stored values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    One,
    Omega,
    Ground(String),
    Product(Vec<TypeExpr>),
    Power(Box<TypeExpr>),
}

impl TypeExpr {
    pub fn ground(name: impl Into<String>) -> Self {
        TypeExpr::Ground(name.into())
    }

    /// Builds a product type, normalizing the empty product to `One` and a
    /// singleton product to its factor.
    pub fn product(mut factors: Vec<TypeExpr>) -> Self {
        match factors.len() {
            0 => TypeExpr::One,
            1 => factors.pop().unwrap(),
            _ => TypeExpr::Product(factors),
        }
    }

    pub fn power(inner: TypeExpr) -> Self {
        TypeExpr::Power(Box::new(inner))
    }

    /// Factors of this type viewed as a product: `One` has zero, a product
    /// has its components, anything else is a 1-ary product of itself.
    pub fn factors(&self) -> Vec<TypeExpr> {
        match self {
            TypeExpr::One => vec![],
            TypeExpr::Product(fs) => fs.clone(),
            other => vec![other.clone()],
        }
    }

    pub fn as_power(&self) -> Option<&TypeExpr> {
        match self {
            TypeExpr::Power(inner) => Some(inner),
            _ => None,
        }
    }

    pub fn is_power(&self) -> bool {
        matches!(self, TypeExpr::Power(_))
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::One => write!(f, "One"),
            TypeExpr::Omega => write!(f, "Omega"),
            TypeExpr::Ground(g) => write!(f, "{g}"),
            TypeExpr::Product(fs) => {
                write!(f, "(prod")?;
                for t in fs {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            TypeExpr::Power(t) => write!(f, "(pow {t})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Variables
// ---------------------------------------------------------------------------

/// A variable is a name together with its type; the same name at distinct
/// types counts as distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: String,
    pub ty: TypeExpr,
}

impl Var {
    pub fn new(name: impl Into<String>, ty: TypeExpr) -> Self {
        Var {
            name: name.into(),
            ty,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.ty)
    }
}

/// Finite set of variables.
pub type VarSet = BTreeSet<Var>;

/// Picks a variable named `{base}{n}` (monotone counter suffix) whose name
/// avoids everything in `avoid`.
pub fn fresh_var(base: &str, ty: TypeExpr, avoid: &BTreeSet<String>) -> Var {
    loop {
        let n = FRESH_COUNTER.fetch_add(1, AtomicOrdering::Relaxed);
        let name = format!("{base}{n}");
        if !avoid.contains(&name) {
            return Var::new(name, ty);
        }
    }
}

/// All variable names occurring in the given terms, free or bound.
pub fn all_names(terms: &[&Term]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    fn walk(t: &Term, out: &mut BTreeSet<String>) {
        match t.kind() {
            TermKind::Var(v) => {
                out.insert(v.name.clone());
            }
            TermKind::Compr(v, body) => {
                out.insert(v.name.clone());
                walk(body, out);
            }
            TermKind::App(_, a) | TermKind::Proj(_, a) => walk(a, out),
            TermKind::Tuple(items) => {
                for i in items {
                    walk(i, out);
                }
            }
            TermKind::Eq(a, b) | TermKind::Mem(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            TermKind::Star => {}
        }
    }
    for t in terms {
        walk(t, &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

/// A local-language signature: ground type symbols plus function symbols
/// with their signatures, and the Nullstellensatz flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    grounds: Vec<String>,
    fns: BTreeMap<String, (TypeExpr, TypeExpr)>,
    nullstellensatz: bool,
}

impl Signature {
    pub fn new(
        grounds: Vec<String>,
        fns: Vec<(String, TypeExpr, TypeExpr)>,
        nullstellensatz: bool,
    ) -> Result<Self> {
        let mut sig = Signature {
            grounds: Vec::new(),
            fns: BTreeMap::new(),
            nullstellensatz: false,
        };
        for g in grounds {
            sig.add_ground(g)?;
        }
        for (name, arg, res) in fns {
            sig.add_fn(name, arg, res)?;
        }
        if nullstellensatz {
            sig.set_nullstellensatz()?;
        }
        Ok(sig)
    }

    /// Empty signature: no grounds, no function symbols.
    pub fn empty() -> Self {
        Signature {
            grounds: Vec::new(),
            fns: BTreeMap::new(),
            nullstellensatz: false,
        }
    }

    pub fn add_ground(&mut self, name: impl Into<String>) -> Result<()> {
        let name = name.into();
        if self.grounds.contains(&name) {
            return Err(Error::Resolution(format!(
                "ground type `{name}` declared twice"
            )));
        }
        self.grounds.push(name);
        Ok(())
    }

    pub fn add_fn(
        &mut self,
        name: impl Into<String>,
        arg: TypeExpr,
        res: TypeExpr,
    ) -> Result<()> {
        let name = name.into();
        if self.fns.contains_key(&name) {
            return Err(Error::Resolution(format!(
                "function symbol `{name}` declared twice"
            )));
        }
        self.validate_type(&arg)?;
        self.validate_type(&res)?;
        self.fns.insert(name, (arg, res));
        Ok(())
    }

    /// Turns the Nullstellensatz flag on, checking that every ground type
    /// already has a constant (a function symbol of signature `1 -> A`).
    pub fn set_nullstellensatz(&mut self) -> Result<()> {
        for g in &self.grounds {
            let has_constant = self.fns.values().any(|(arg, res)| {
                *arg == TypeExpr::One && *res == TypeExpr::Ground(g.clone())
            });
            if !has_constant {
                return Err(Error::side_condition(
                    "Nullstellensatz",
                    format!("ground type `{g}` has no function symbol of signature 1 -> {g}"),
                ));
            }
        }
        self.nullstellensatz = true;
        Ok(())
    }

    pub fn grounds(&self) -> &[String] {
        &self.grounds
    }

    pub fn ground_index(&self, name: &str) -> Option<usize> {
        self.grounds.iter().position(|g| g == name)
    }

    pub fn fns(&self) -> impl Iterator<Item = (&String, &(TypeExpr, TypeExpr))> {
        self.fns.iter()
    }

    pub fn fn_sig(&self, name: &str) -> Result<(&TypeExpr, &TypeExpr)> {
        self.fns
            .get(name)
            .map(|(a, r)| (a, r))
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    pub fn nullstellensatz(&self) -> bool {
        self.nullstellensatz
    }

    pub fn validate_type(&self, ty: &TypeExpr) -> Result<()> {
        match ty {
            TypeExpr::One | TypeExpr::Omega => Ok(()),
            TypeExpr::Ground(g) => {
                if self.grounds.contains(g) {
                    Ok(())
                } else {
                    Err(Error::UnknownGround(g.clone()))
                }
            }
            TypeExpr::Product(fs) => {
                if fs.len() < 2 {
                    return Err(Error::ArityError(
                        "stored product types have at least two factors".into(),
                    ));
                }
                fs.iter().try_for_each(|t| self.validate_type(t))
            }
            TypeExpr::Power(t) => self.validate_type(t),
        }
    }

    /// Checked application: builds `f(arg)` after matching the symbol's
    /// declared argument type.
    pub fn app(&self, name: &str, arg: Term) -> Result<Term> {
        let (arg_ty, res_ty) = self.fn_sig(name)?;
        if arg.ty() != arg_ty {
            return Err(Error::TypeMismatch(format!(
                "function `{name}` expects argument of type {arg_ty}, got {}",
                arg.ty()
            )));
        }
        let res_ty = res_ty.clone();
        Ok(Term::make(
            TermKind::App(name.to_string(), arg),
            res_ty,
        ))
    }

    /// Checks that a typed term only mentions declared ground types and
    /// function symbols (with matching argument types).
    pub fn validate_term(&self, t: &Term) -> Result<()> {
        match t.kind() {
            TermKind::Star => Ok(()),
            TermKind::Var(v) => self.validate_type(&v.ty),
            TermKind::App(f, a) => {
                let (arg_ty, _) = self.fn_sig(f)?;
                if a.ty() != arg_ty {
                    return Err(Error::TypeMismatch(format!(
                        "function `{f}` expects argument of type {arg_ty}, got {}",
                        a.ty()
                    )));
                }
                self.validate_term(a)
            }
            TermKind::Tuple(items) => items.iter().try_for_each(|i| self.validate_term(i)),
            TermKind::Proj(_, a) => self.validate_term(a),
            TermKind::Compr(v, body) => {
                self.validate_type(&v.ty)?;
                self.validate_term(body)
            }
            TermKind::Eq(a, b) | TermKind::Mem(a, b) => {
                self.validate_term(a)?;
                self.validate_term(b)
            }
        }
    }

    /// A closed term of the given type, when one is constructible from the
    /// signature: `*` at `One`, `*=*` at `Omega`, tuples at products, the
    /// empty comprehension at powers, and constant chains at grounds.
    pub fn closed_term(&self, ty: &TypeExpr) -> Option<Term> {
        self.closed_term_rec(ty, &mut BTreeSet::new())
    }

    fn closed_term_rec(&self, ty: &TypeExpr, visiting: &mut BTreeSet<String>) -> Option<Term> {
        match ty {
            TypeExpr::One => Some(Term::star()),
            TypeExpr::Omega => Some(Term::eq(Term::star(), Term::star()).unwrap()),
            TypeExpr::Product(fs) => {
                let items = fs
                    .iter()
                    .map(|f| self.closed_term_rec(f, visiting))
                    .collect::<Option<Vec<_>>>()?;
                Some(Term::tuple(items))
            }
            TypeExpr::Power(inner) => {
                let x = Var::new("x", (**inner).clone());
                let body = Term::eq(Term::var(x.clone()), Term::var(x.clone())).unwrap();
                Some(Term::compr(x, body).unwrap())
            }
            TypeExpr::Ground(g) => {
                if visiting.contains(g) {
                    return None;
                }
                visiting.insert(g.clone());
                let mut found = None;
                for (name, (arg, res)) in &self.fns {
                    if res != ty {
                        continue;
                    }
                    if let Some(arg_term) = self.closed_term_rec(arg, visiting) {
                        found = Some(self.app(name, arg_term).unwrap());
                        break;
                    }
                }
                visiting.remove(g);
                found
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

/// Untyped term tree, the input of [`typecheck`]. The parser produces these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawTerm {
    Star,
    Var(String, TypeExpr),
    App(String, Box<RawTerm>),
    Tuple(Vec<RawTerm>),
    Proj(usize, Box<RawTerm>),
    Compr(String, TypeExpr, Box<RawTerm>),
    Eq(Box<RawTerm>, Box<RawTerm>),
    Mem(Box<RawTerm>, Box<RawTerm>),
}

#[derive(Debug)]
pub enum TermKind {
    Star,
    Var(Var),
    App(String, Term),
    /// Always at least two components.
    Tuple(Vec<Term>),
    /// 1-based projection out of a term of genuine product type.
    Proj(usize, Term),
    Compr(Var, Term),
    Eq(Term, Term),
    Mem(Term, Term),
}

#[derive(Debug)]
struct TermNode {
    kind: TermKind,
    ty: TypeExpr,
    free: VarSet,
}

/// A typed term of a local language. Cloning is cheap (shared node), the
/// type and free-variable set are cached on every node, and comparison,
/// ordering and hashing are all up to α-equivalence.
#[derive(Clone)]
pub struct Term(Arc<TermNode>);

impl Term {
    fn make(kind: TermKind, ty: TypeExpr) -> Term {
        let free = match &kind {
            TermKind::Star => VarSet::new(),
            TermKind::Var(v) => {
                let mut s = VarSet::new();
                s.insert(v.clone());
                s
            }
            TermKind::App(_, a) | TermKind::Proj(_, a) => a.0.free.clone(),
            TermKind::Tuple(items) => {
                let mut s = VarSet::new();
                for i in items {
                    s.extend(i.0.free.iter().cloned());
                }
                s
            }
            TermKind::Compr(v, body) => {
                let mut s = body.0.free.clone();
                s.remove(v);
                s
            }
            TermKind::Eq(a, b) | TermKind::Mem(a, b) => {
                let mut s = a.0.free.clone();
                s.extend(b.0.free.iter().cloned());
                s
            }
        };
        Term(Arc::new(TermNode { kind, ty, free }))
    }

    pub fn star() -> Term {
        Term::make(TermKind::Star, TypeExpr::One)
    }

    pub fn var(v: Var) -> Term {
        let ty = v.ty.clone();
        Term::make(TermKind::Var(v), ty)
    }

    /// Tupling with the paper's provisos: zero components collapse to `*`,
    /// one component collapses to that component.
    pub fn tuple(mut items: Vec<Term>) -> Term {
        match items.len() {
            0 => Term::star(),
            1 => items.pop().unwrap(),
            _ => {
                let ty = TypeExpr::Product(items.iter().map(|t| t.ty().clone()).collect());
                Term::make(TermKind::Tuple(items), ty)
            }
        }
    }

    /// Projection with the proviso that `(τ)₁ is τ` when the type of `τ` is
    /// not a genuine product. Projections out of `One` are rejected.
    pub fn proj(index: usize, t: Term) -> Result<Term> {
        match t.ty() {
            TypeExpr::Product(fs) => {
                if index == 0 || index > fs.len() {
                    Err(Error::ArityError(format!(
                        "projection index {index} out of range for {}",
                        t.ty()
                    )))
                } else {
                    let ty = fs[index - 1].clone();
                    Ok(Term::make(TermKind::Proj(index, t), ty))
                }
            }
            TypeExpr::One => Err(Error::ArityError(
                "cannot project out of the unity type".into(),
            )),
            _ => {
                if index == 1 {
                    Ok(t)
                } else {
                    Err(Error::ArityError(format!(
                        "projection index {index} out of range for {}",
                        t.ty()
                    )))
                }
            }
        }
    }

    pub fn compr(v: Var, body: Term) -> Result<Term> {
        if body.ty() != &TypeExpr::Omega {
            return Err(Error::TypeMismatch(format!(
                "comprehension body must be a formula, got type {}",
                body.ty()
            )));
        }
        let ty = TypeExpr::power(v.ty.clone());
        Ok(Term::make(TermKind::Compr(v, body), ty))
    }

    pub fn eq(a: Term, b: Term) -> Result<Term> {
        if a.ty() != b.ty() {
            return Err(Error::TypeMismatch(format!(
                "equality requires equal types, got {} and {}",
                a.ty(),
                b.ty()
            )));
        }
        Ok(Term::make(TermKind::Eq(a, b), TypeExpr::Omega))
    }

    pub fn mem(elem: Term, set: Term) -> Result<Term> {
        match set.ty() {
            TypeExpr::Power(inner) if inner.as_ref() == elem.ty() => {
                Ok(Term::make(TermKind::Mem(elem, set), TypeExpr::Omega))
            }
            other => Err(Error::TypeMismatch(format!(
                "membership requires second argument of type (pow {}), got {}",
                elem.ty(),
                other
            ))),
        }
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &TypeExpr {
        &self.0.ty
    }

    /// Exactly the variables with at least one free occurrence.
    pub fn free_vars(&self) -> &VarSet {
        &self.0.free
    }

    pub fn is_closed(&self) -> bool {
        self.0.free.is_empty()
    }

    pub fn is_formula(&self) -> bool {
        self.0.ty == TypeExpr::Omega
    }

    /// Stable address of the shared node; used as a cache key by the
    /// evaluator.
    pub fn node_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Single substitution `t(x/σ)`.
    pub fn substitute(&self, x: &Var, replacement: &Term, mode: SubstMode) -> Result<Term> {
        self.substitute_many(std::slice::from_ref(&(x.clone(), replacement.clone())), mode)
    }

    /// Simultaneous substitution `t(x₁/σ₁, …, xₙ/σₙ)`.
    pub fn substitute_many(&self, subs: &[(Var, Term)], mode: SubstMode) -> Result<Term> {
        let mut seen = BTreeSet::new();
        for (v, rep) in subs {
            if !seen.insert(v.clone()) {
                return Err(Error::VariableClash(format!(
                    "variable `{}` substituted twice",
                    v.name
                )));
            }
            if rep.ty() != &v.ty {
                return Err(Error::TypeMismatch(format!(
                    "substituting a term of type {} for `{}` of type {}",
                    rep.ty(),
                    v.name,
                    v.ty
                )));
            }
        }
        let live: Vec<(Var, Term)> = subs.to_vec();
        subst_rec(self, &live, mode)
    }

    /// True when `replacement` is free for `x` in `self`: no free occurrence
    /// of `x` sits under a binder that binds a free variable of
    /// `replacement`.
    pub fn free_for(&self, x: &Var, replacement: &Term) -> bool {
        self.substitute(x, replacement, SubstMode::Strict).is_ok()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubstMode {
    /// Mirrors the paper's "free for" side conditions; fails with
    /// [`Error::NotFreeFor`] on capture.
    Strict,
    /// Freshens bound variables as needed so the substitution always
    /// succeeds.
    Renaming,
}

fn subst_rec(t: &Term, subs: &[(Var, Term)], mode: SubstMode) -> Result<Term> {
    // Fast path: nothing to substitute below this node.
    if !subs.iter().any(|(v, _)| t.free_vars().contains(v)) {
        return Ok(t.clone());
    }
    match t.kind() {
        TermKind::Star => Ok(t.clone()),
        TermKind::Var(v) => {
            for (x, rep) in subs {
                if v == x {
                    return Ok(rep.clone());
                }
            }
            Ok(t.clone())
        }
        TermKind::App(f, a) => {
            let a2 = subst_rec(a, subs, mode)?;
            Ok(Term::make(
                TermKind::App(f.clone(), a2),
                t.ty().clone(),
            ))
        }
        TermKind::Tuple(items) => {
            let items2 = items
                .iter()
                .map(|i| subst_rec(i, subs, mode))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::tuple(items2))
        }
        TermKind::Proj(i, a) => {
            let a2 = subst_rec(a, subs, mode)?;
            Term::proj(*i, a2)
        }
        TermKind::Eq(a, b) => Term::eq(subst_rec(a, subs, mode)?, subst_rec(b, subs, mode)?),
        TermKind::Mem(a, b) => Term::mem(subst_rec(a, subs, mode)?, subst_rec(b, subs, mode)?),
        TermKind::Compr(bound, body) => {
            // Live pairs: not shadowed by the binder and actually free below.
            let live: Vec<(Var, Term)> = subs
                .iter()
                .filter(|(v, _)| v != bound && body.free_vars().contains(v))
                .cloned()
                .collect();
            if live.is_empty() {
                return Ok(t.clone());
            }
            let captures = live.iter().any(|(_, rep)| rep.free_vars().contains(bound));
            if !captures {
                let body2 = subst_rec(body, &live, mode)?;
                return Term::compr(bound.clone(), body2);
            }
            match mode {
                SubstMode::Strict => {
                    let (v, rep) = live
                        .iter()
                        .find(|(_, rep)| rep.free_vars().contains(bound))
                        .unwrap();
                    Err(Error::NotFreeFor {
                        replacement: format!("{rep:?}"),
                        var: v.name.clone(),
                        term: format!("{{{bound}: ...}}"),
                    })
                }
                SubstMode::Renaming => {
                    let mut avoid: BTreeSet<String> =
                        body.free_vars().iter().map(|v| v.name.clone()).collect();
                    for (_, rep) in &live {
                        avoid.extend(rep.free_vars().iter().map(|v| v.name.clone()));
                    }
                    let fresh = fresh_var(&bound.name, bound.ty.clone(), &avoid);
                    let renamed =
                        subst_rec(body, &[(bound.clone(), Term::var(fresh.clone()))], mode)?;
                    let body2 = subst_rec(&renamed, &live, mode)?;
                    Term::compr(fresh, body2)
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// α-equivalence, ordering, hashing
// ---------------------------------------------------------------------------

fn kind_rank(k: &TermKind) -> u8 {
    match k {
        TermKind::Star => 0,
        TermKind::Var(_) => 1,
        TermKind::App(..) => 2,
        TermKind::Tuple(_) => 3,
        TermKind::Proj(..) => 4,
        TermKind::Compr(..) => 5,
        TermKind::Eq(..) => 6,
        TermKind::Mem(..) => 7,
    }
}

/// De Bruijn position of `v` in the binder stack, innermost first.
fn bound_index(stack: &[Var], v: &Var) -> Option<usize> {
    stack.iter().rev().position(|b| b == v)
}

fn alpha_cmp(a: &Term, b: &Term, sa: &mut Vec<Var>, sb: &mut Vec<Var>) -> Ordering {
    let ra = kind_rank(a.kind());
    let rb = kind_rank(b.kind());
    if ra != rb {
        return ra.cmp(&rb);
    }
    match (a.kind(), b.kind()) {
        (TermKind::Star, TermKind::Star) => Ordering::Equal,
        (TermKind::Var(va), TermKind::Var(vb)) => {
            match (bound_index(sa, va), bound_index(sb, vb)) {
                (Some(i), Some(j)) => i.cmp(&j),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => va.cmp(vb),
            }
        }
        (TermKind::App(fa, aa), TermKind::App(fb, ab)) => fa
            .cmp(fb)
            .then_with(|| alpha_cmp(aa, ab, sa, sb)),
        (TermKind::Tuple(ia), TermKind::Tuple(ib)) => {
            ia.len().cmp(&ib.len()).then_with(|| {
                for (x, y) in ia.iter().zip(ib) {
                    let c = alpha_cmp(x, y, sa, sb);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            })
        }
        (TermKind::Proj(i, ta), TermKind::Proj(j, tb)) => {
            i.cmp(j).then_with(|| alpha_cmp(ta, tb, sa, sb))
        }
        (TermKind::Compr(va, ba), TermKind::Compr(vb, bb)) => va.ty.cmp(&vb.ty).then_with(|| {
            sa.push(va.clone());
            sb.push(vb.clone());
            let c = alpha_cmp(ba, bb, sa, sb);
            sa.pop();
            sb.pop();
            c
        }),
        (TermKind::Eq(xa, ya), TermKind::Eq(xb, yb))
        | (TermKind::Mem(xa, ya), TermKind::Mem(xb, yb)) => alpha_cmp(xa, xb, sa, sb)
            .then_with(|| alpha_cmp(ya, yb, sa, sb)),
        _ => unreachable!("rank already compared"),
    }
}

/// α-equivalence: equality after canonical renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    if Arc::ptr_eq(&a.0, &b.0) {
        return true;
    }
    a.ty() == b.ty() && alpha_cmp(a, b, &mut Vec::new(), &mut Vec::new()) == Ordering::Equal
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        alpha_cmp(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

fn alpha_hash<H: Hasher>(t: &Term, stack: &mut Vec<Var>, state: &mut H) {
    kind_rank(t.kind()).hash(state);
    match t.kind() {
        TermKind::Star => {}
        TermKind::Var(v) => match bound_index(stack, v) {
            Some(i) => {
                0u8.hash(state);
                i.hash(state);
            }
            None => {
                1u8.hash(state);
                v.hash(state);
            }
        },
        TermKind::App(f, a) => {
            f.hash(state);
            alpha_hash(a, stack, state);
        }
        TermKind::Tuple(items) => {
            items.len().hash(state);
            for i in items {
                alpha_hash(i, stack, state);
            }
        }
        TermKind::Proj(i, a) => {
            i.hash(state);
            alpha_hash(a, stack, state);
        }
        TermKind::Compr(v, body) => {
            v.ty.hash(state);
            stack.push(v.clone());
            alpha_hash(body, stack, state);
            stack.pop();
        }
        TermKind::Eq(a, b) | TermKind::Mem(a, b) => {
            alpha_hash(a, stack, state);
            alpha_hash(b, stack, state);
        }
    }
}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        alpha_hash(self, &mut Vec::new(), state);
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Delegates to the canonical printer (defined in `syntax`).
        write!(f, "{}", crate::syntax::print_term(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print_term(self))
    }
}

// ---------------------------------------------------------------------------
// Typechecking
// ---------------------------------------------------------------------------

/// Assigns the unique type to a raw term tree over `sig`, producing a typed
/// [`Term`] with types cached on every node and the tuple/projection
/// provisos applied.
pub fn typecheck(sig: &Signature, raw: &RawTerm) -> Result<Term> {
    match raw {
        RawTerm::Star => Ok(Term::star()),
        RawTerm::Var(name, ty) => {
            sig.validate_type(ty)?;
            Ok(Term::var(Var::new(name.clone(), ty.clone())))
        }
        RawTerm::App(f, arg) => {
            let arg = typecheck(sig, arg)?;
            sig.app(f, arg)
        }
        RawTerm::Tuple(items) => {
            let items = items
                .iter()
                .map(|i| typecheck(sig, i))
                .collect::<Result<Vec<_>>>()?;
            Ok(Term::tuple(items))
        }
        RawTerm::Proj(i, inner) => {
            let inner = typecheck(sig, inner)?;
            Term::proj(*i, inner)
        }
        RawTerm::Compr(name, ty, body) => {
            sig.validate_type(ty)?;
            let body = typecheck(sig, body)?;
            Term::compr(Var::new(name.clone(), ty.clone()), body)
        }
        RawTerm::Eq(a, b) => Term::eq(typecheck(sig, a)?, typecheck(sig, b)?),
        RawTerm::Mem(a, b) => Term::mem(typecheck(sig, a)?, typecheck(sig, b)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_ab() -> Signature {
        Signature::new(
            vec!["A".into(), "B".into()],
            vec![(
                "f".into(),
                TypeExpr::ground("A"),
                TypeExpr::ground("B"),
            )],
            false,
        )
        .unwrap()
    }

    fn va(name: &str) -> Var {
        Var::new(name, TypeExpr::ground("A"))
    }

    #[test]
    fn star_types_as_one() {
        let sig = Signature::empty();
        let t = typecheck(&sig, &RawTerm::Star).unwrap();
        assert_eq!(t.ty(), &TypeExpr::One);
    }

    #[test]
    fn empty_tuple_normalizes_to_star() {
        let sig = Signature::empty();
        let t = typecheck(&sig, &RawTerm::Tuple(vec![])).unwrap();
        assert_eq!(t, Term::star());
        assert_eq!(t.ty(), &TypeExpr::One);
    }

    #[test]
    fn singleton_tuple_normalizes_away() {
        let t = Term::tuple(vec![Term::var(va("x"))]);
        assert!(matches!(t.kind(), TermKind::Var(_)));
    }

    #[test]
    fn mem_needs_power_type() {
        let sig = sig_ab();
        let raw = RawTerm::Mem(
            Box::new(RawTerm::Var("x".into(), TypeExpr::ground("A"))),
            Box::new(RawTerm::Var("y".into(), TypeExpr::ground("A"))),
        );
        assert!(matches!(
            typecheck(&sig, &raw),
            Err(Error::TypeMismatch(_))
        ));
    }

    #[test]
    fn unknown_symbol_reported() {
        let sig = Signature::empty();
        let raw = RawTerm::App("g".into(), Box::new(RawTerm::Star));
        assert!(matches!(
            typecheck(&sig, &raw),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn proj_on_one_is_arity_error() {
        assert!(matches!(
            Term::proj(1, Term::star()),
            Err(Error::ArityError(_))
        ));
    }

    #[test]
    fn proj_one_on_nonproduct_is_identity() {
        let x = Term::var(va("x"));
        assert_eq!(Term::proj(1, x.clone()).unwrap(), x);
    }

    #[test]
    fn proj_on_genuine_product_is_kept() {
        let x = Term::var(Var::new(
            "p",
            TypeExpr::product(vec![TypeExpr::ground("A"), TypeExpr::ground("B")]),
        ));
        let p1 = Term::proj(1, x.clone()).unwrap();
        assert!(matches!(p1.kind(), TermKind::Proj(1, _)));
        assert_eq!(p1.ty(), &TypeExpr::ground("A"));
        // (x)_1 is not x for product-typed x.
        assert_ne!(p1, x);
    }

    #[test]
    fn free_vars_of_comprehension() {
        let x = va("x");
        let y = va("y");
        let body = Term::eq(Term::var(x.clone()), Term::var(y.clone())).unwrap();
        let compr = Term::compr(x.clone(), body).unwrap();
        assert!(!compr.free_vars().contains(&x));
        assert!(compr.free_vars().contains(&y));
    }

    #[test]
    fn free_vars_of_var_and_closed() {
        let x = va("x");
        assert!(Term::var(x.clone()).free_vars().contains(&x));
        let closed = Term::eq(Term::star(), Term::star()).unwrap();
        assert!(closed.free_vars().is_empty());
    }

    #[test]
    fn substitution_basic() {
        let x = va("x");
        let y = va("y");
        let t = Term::eq(Term::var(x.clone()), Term::var(y.clone())).unwrap();
        // Substituting at type One would be ill-typed; use another A-var.
        let z = Term::var(va("z"));
        let r = t.substitute(&x, &z, SubstMode::Strict).unwrap();
        assert_eq!(
            r,
            Term::eq(Term::var(va("z")), Term::var(y)).unwrap()
        );
    }

    #[test]
    fn substitution_skips_bound_occurrences() {
        let x = va("x");
        let y = va("y");
        let body = Term::eq(Term::var(x.clone()), Term::var(y.clone())).unwrap();
        let compr = Term::compr(x.clone(), body).unwrap();
        let r = compr
            .substitute(&x, &Term::var(va("w")), SubstMode::Strict)
            .unwrap();
        assert_eq!(r, compr);
    }

    #[test]
    fn strict_substitution_rejects_capture_and_renaming_avoids_it() {
        // {y : y = x}(x/y) captures in strict mode.
        let x = va("x");
        let y = va("y");
        let body = Term::eq(Term::var(y.clone()), Term::var(x.clone())).unwrap();
        let compr = Term::compr(y.clone(), body).unwrap();
        let err = compr
            .substitute(&x, &Term::var(y.clone()), SubstMode::Strict)
            .unwrap_err();
        assert!(matches!(err, Error::NotFreeFor { .. }));

        let renamed = compr
            .substitute(&x, &Term::var(y.clone()), SubstMode::Renaming)
            .unwrap();
        // Result must be {y' : y' = y} for some fresh y'.
        if let TermKind::Compr(b, inner) = renamed.kind() {
            assert_ne!(b, &y);
            let expected = Term::eq(Term::var(b.clone()), Term::var(y.clone())).unwrap();
            assert_eq!(inner, &expected);
        } else {
            panic!("expected comprehension");
        }
    }

    #[test]
    fn alpha_eq_on_comprehensions() {
        let x = va("x");
        let y = va("y");
        let cx = Term::compr(
            x.clone(),
            Term::eq(Term::var(x.clone()), Term::var(x.clone())).unwrap(),
        )
        .unwrap();
        let cy = Term::compr(
            y.clone(),
            Term::eq(Term::var(y.clone()), Term::var(y.clone())).unwrap(),
        )
        .unwrap();
        assert_eq!(cx, cy);
        assert_ne!(Term::var(x), Term::var(y));
    }

    #[test]
    fn nullstellensatz_requires_constants() {
        let err = Signature::new(
            vec!["A".into(), "B".into()],
            vec![("a".into(), TypeExpr::One, TypeExpr::ground("A"))],
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SideConditionViolated { .. }));

        let ok = Signature::new(
            vec!["A".into()],
            vec![("a".into(), TypeExpr::One, TypeExpr::ground("A"))],
            true,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn closed_term_search() {
        let sig = Signature::new(
            vec!["A".into(), "B".into()],
            vec![
                ("a".into(), TypeExpr::One, TypeExpr::ground("A")),
                ("g".into(), TypeExpr::ground("A"), TypeExpr::ground("B")),
            ],
            false,
        )
        .unwrap();
        assert!(sig.closed_term(&TypeExpr::ground("A")).is_some());
        // B reachable through g(a(*)).
        let b = sig.closed_term(&TypeExpr::ground("B")).unwrap();
        assert!(b.is_closed());
        assert_eq!(b.ty(), &TypeExpr::ground("B"));
        // A ground with no constants at all has no closed term.
        let sig2 = Signature::new(vec!["C".into()], vec![], false).unwrap();
        assert!(sig2.closed_term(&TypeExpr::ground("C")).is_none());
    }
}
