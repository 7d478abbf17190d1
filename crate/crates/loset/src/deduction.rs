//! Sequents, the five basic axiom schemas, the five inference rules with
//! their exact side conditions, proof trees, and the checker.
//!
//! Contexts are finite sets of formulas, kept as canonically sorted,
//! deduplicated lists; all comparisons are up to α-equivalence. The checker
//! re-validates every node: leaf labels must match their schema
//! instantiation and rule nodes must re-derive under [`apply_rule`].

pub mod tactics;

use std::fmt;

use crate::error::{Error, Result};
use crate::language::{Signature, SubstMode, Term, TermKind, TypeExpr, Var, VarSet};
use crate::sugar;

// ---------------------------------------------------------------------------
// Sequents and theories
// ---------------------------------------------------------------------------

/// A context-conclusion pair `Γ : α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sequent {
    context: Vec<Term>,
    conclusion: Term,
}

impl Sequent {
    pub fn new(mut context: Vec<Term>, conclusion: Term) -> Result<Self> {
        for f in context.iter().chain(std::iter::once(&conclusion)) {
            if !f.is_formula() {
                return Err(Error::TypeMismatch(format!(
                    "sequent member of type {} is not a formula",
                    f.ty()
                )));
            }
        }
        context.sort();
        context.dedup();
        Ok(Sequent {
            context,
            conclusion,
        })
    }

    pub fn context(&self) -> &[Term] {
        &self.context
    }

    pub fn conclusion(&self) -> &Term {
        &self.conclusion
    }

    pub fn context_contains(&self, f: &Term) -> bool {
        self.context.binary_search(f).is_ok()
    }

    /// Context with one formula removed (α-aware).
    pub fn context_without(&self, f: &Term) -> Vec<Term> {
        self.context
            .iter()
            .filter(|g| *g != f)
            .cloned()
            .collect()
    }

    pub fn free_vars(&self) -> VarSet {
        let mut s = VarSet::new();
        for f in &self.context {
            s.extend(f.free_vars().iter().cloned());
        }
        s.extend(self.conclusion.free_vars().iter().cloned());
        s
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(seq (")?;
        for (i, h) in self.context.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, ") {})", self.conclusion)
    }
}

/// A signature together with a generating set of axioms. Closure under
/// derivability is never materialized; `Γ ⊢_S α` means "some supplied
/// proof tree checks".
#[derive(Clone, Debug)]
pub struct Theory {
    pub signature: Signature,
    pub axioms: Vec<Sequent>,
}

impl Theory {
    pub fn new(signature: Signature, axioms: Vec<Sequent>) -> Result<Self> {
        for ax in &axioms {
            for f in ax.context().iter().chain(std::iter::once(ax.conclusion())) {
                signature.validate_term(f)?;
            }
        }
        Ok(Theory { signature, axioms })
    }
}

/// True iff every ground type has a constant: a function symbol of
/// signature `1 -> A`.
pub fn nullstellensatz_holds(sig: &Signature) -> bool {
    sig.grounds().iter().all(|g| {
        sig.fns().any(|(_, (arg, res))| {
            *arg == TypeExpr::One && *res == TypeExpr::Ground(g.clone())
        })
    })
}

// ---------------------------------------------------------------------------
// Basic axioms
// ---------------------------------------------------------------------------

/// The five basic axiom schemas (Products contributing two shapes).
#[derive(Clone, Debug)]
pub enum BasicAxiom {
    /// `α : α`
    Tautology { alpha: Term },
    /// `: x₁ = ∗` for a variable of unity type
    Unity { var: String },
    /// `x=y, α(z/x) : α(z/y)` with x, y free for z in α
    Equality { x: Var, y: Var, z: Var, alpha: Term },
    /// `: (⟨x₁,…,xₙ⟩)ᵢ = xᵢ`
    ProductProj { vars: Vec<Var>, index: usize },
    /// `: x = ⟨(x)₁,…,(x)ₙ⟩`
    ProductPair { var: Var },
    /// `: x ∈ {x:α} ⇔ α`
    Comprehension { var: Var, alpha: Term },
}

impl BasicAxiom {
    pub fn schema_name(&self) -> &'static str {
        match self {
            BasicAxiom::Tautology { .. } => "Tautology",
            BasicAxiom::Unity { .. } => "Unity",
            BasicAxiom::Equality { .. } => "Equality",
            BasicAxiom::ProductProj { .. } | BasicAxiom::ProductPair { .. } => "Products",
            BasicAxiom::Comprehension { .. } => "Comprehension",
        }
    }
}

fn expect_formula(t: &Term, rule: &str) -> Result<()> {
    if t.is_formula() {
        Ok(())
    } else {
        Err(Error::TypeMismatch(format!(
            "{rule} requires a formula, got type {}",
            t.ty()
        )))
    }
}

/// Instantiates a basic axiom schema, checking its side conditions.
pub fn basic_axiom(sig: &Signature, ax: &BasicAxiom) -> Result<Sequent> {
    match ax {
        BasicAxiom::Tautology { alpha } => {
            expect_formula(alpha, "Tautology")?;
            sig.validate_term(alpha)?;
            Sequent::new(vec![alpha.clone()], alpha.clone())
        }
        BasicAxiom::Unity { var } => {
            let x = Term::var(Var::new(var.clone(), TypeExpr::One));
            Sequent::new(vec![], Term::eq(x, Term::star())?)
        }
        BasicAxiom::Equality { x, y, z, alpha } => {
            expect_formula(alpha, "Equality")?;
            sig.validate_term(alpha)?;
            if x.ty != z.ty || y.ty != z.ty {
                return Err(Error::TypeMismatch(
                    "Equality axiom requires x, y, z of one type".into(),
                ));
            }
            let sub = |v: &Var| -> Result<Term> {
                alpha
                    .substitute(z, &Term::var(v.clone()), SubstMode::Strict)
                    .map_err(|_| {
                        Error::side_condition("Equality", "x, y free for z in α")
                    })
            };
            let with_x = sub(x)?;
            let with_y = sub(y)?;
            let eq = Term::eq(Term::var(x.clone()), Term::var(y.clone()))?;
            Sequent::new(vec![eq, with_x], with_y)
        }
        BasicAxiom::ProductProj { vars, index } => {
            let n = vars.len();
            if n == 0 {
                return Err(Error::ArityError(
                    "Products projection needs at least one variable".into(),
                ));
            }
            if *index == 0 || *index > n {
                return Err(Error::ArityError(format!(
                    "projection index {index} out of range 1..={n}"
                )));
            }
            for v in vars {
                sig.validate_type(&v.ty)?;
            }
            // With n = 1 both provisos collapse the instance to `: x = x`.
            let lhs = if n == 1 {
                Term::var(vars[0].clone())
            } else {
                Term::proj(
                    *index,
                    Term::tuple(vars.iter().map(|v| Term::var(v.clone())).collect()),
                )?
            };
            Sequent::new(vec![], Term::eq(lhs, Term::var(vars[*index - 1].clone()))?)
        }
        BasicAxiom::ProductPair { var } => {
            sig.validate_type(&var.ty)?;
            let x = Term::var(var.clone());
            let rhs = match &var.ty {
                TypeExpr::Product(fs) => Term::tuple(
                    (1..=fs.len())
                        .map(|i| Term::proj(i, x.clone()))
                        .collect::<Result<Vec<_>>>()?,
                ),
                TypeExpr::One => Term::star(),
                _ => x.clone(),
            };
            Sequent::new(vec![], Term::eq(x, rhs)?)
        }
        BasicAxiom::Comprehension { var, alpha } => {
            expect_formula(alpha, "Comprehension")?;
            sig.validate_term(alpha)?;
            sig.validate_type(&var.ty)?;
            let mem = Term::mem(
                Term::var(var.clone()),
                Term::compr(var.clone(), alpha.clone())?,
            )?;
            Sequent::new(vec![], sugar::iff(mem, alpha.clone())?)
        }
    }
}

// ---------------------------------------------------------------------------
// Inference rules
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub enum Rule {
    Thinning { formula: Term },
    Cut,
    Substitution { var: Var, term: Term },
    Extensionality { var: Var },
    Equivalence,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Thinning { .. } => "Thinning",
            Rule::Cut => "Cut",
            Rule::Substitution { .. } => "Substitution",
            Rule::Extensionality { .. } => "Extensionality",
            Rule::Equivalence => "Equivalence",
        }
    }
}

fn expect_premises(rule: &Rule, premises: &[Sequent], n: usize) -> Result<()> {
    if premises.len() == n {
        Ok(())
    } else {
        Err(Error::shape(
            rule.name(),
            format!("expected {n} premise(s), got {}", premises.len()),
        ))
    }
}

fn fv_of(terms: &[Term]) -> VarSet {
    let mut s = VarSet::new();
    for t in terms {
        s.extend(t.free_vars().iter().cloned());
    }
    s
}

/// Applies an inference rule to premise sequents, enforcing the rule's
/// exact shape and side conditions.
pub fn apply_rule(sig: &Signature, rule: &Rule, premises: &[Sequent]) -> Result<Sequent> {
    match rule {
        Rule::Thinning { formula } => {
            expect_premises(rule, premises, 1)?;
            expect_formula(formula, "Thinning")?;
            sig.validate_term(formula)?;
            let mut ctx = premises[0].context.clone();
            ctx.push(formula.clone());
            Sequent::new(ctx, premises[0].conclusion.clone())
        }
        Rule::Cut => {
            expect_premises(rule, premises, 2)?;
            let (first, second) = (&premises[0], &premises[1]);
            let alpha = first.conclusion();
            let mut expected = first.context.clone();
            expected.push(alpha.clone());
            let expected = Sequent::new(expected, second.conclusion.clone())?;
            if expected.context != second.context {
                return Err(Error::shape(
                    "Cut",
                    "second premise context must be the first's plus its conclusion",
                ));
            }
            let beta = second.conclusion();
            let allowed: VarSet = fv_of(&first.context)
                .union(beta.free_vars())
                .cloned()
                .collect();
            if !alpha.free_vars().is_subset(&allowed) {
                return Err(Error::side_condition(
                    "Cut",
                    "free variables in α free in Γ or β",
                ));
            }
            Sequent::new(first.context.clone(), beta.clone())
        }
        Rule::Substitution { var, term } => {
            expect_premises(rule, premises, 1)?;
            sig.validate_term(term)?;
            let sub = |f: &Term| -> Result<Term> {
                f.substitute(var, term, SubstMode::Strict).map_err(|e| match e {
                    Error::NotFreeFor { .. } => {
                        Error::side_condition("Substitution", "τ free for x in Γ and α")
                    }
                    other => other,
                })
            };
            let ctx = premises[0]
                .context
                .iter()
                .map(&sub)
                .collect::<Result<Vec<_>>>()?;
            Sequent::new(ctx, sub(&premises[0].conclusion)?)
        }
        Rule::Extensionality { var } => {
            expect_premises(rule, premises, 1)?;
            let prem = &premises[0];
            let (sigma, tau) = match prem.conclusion.kind() {
                TermKind::Eq(l, r) => match (l.kind(), r.kind()) {
                    (TermKind::Mem(xl, sigma), TermKind::Mem(xr, tau)) => {
                        let ok = |t: &Term| matches!(t.kind(), TermKind::Var(v) if v == var);
                        if !(ok(xl) && ok(xr)) {
                            return Err(Error::shape(
                                "Extensionality",
                                "conclusion must be x∈σ ⇔ x∈τ for the given x",
                            ));
                        }
                        (sigma.clone(), tau.clone())
                    }
                    _ => {
                        return Err(Error::shape(
                            "Extensionality",
                            "conclusion must be a biconditional of memberships",
                        ))
                    }
                },
                _ => {
                    return Err(Error::shape(
                        "Extensionality",
                        "conclusion must be x∈σ ⇔ x∈τ",
                    ))
                }
            };
            if fv_of(&prem.context).contains(var) {
                return Err(Error::side_condition("Extensionality", "x not free in Γ"));
            }
            if sigma.free_vars().contains(var) {
                return Err(Error::side_condition("Extensionality", "x not free in σ"));
            }
            if tau.free_vars().contains(var) {
                return Err(Error::side_condition("Extensionality", "x not free in τ"));
            }
            Sequent::new(prem.context.clone(), Term::eq(sigma, tau)?)
        }
        Rule::Equivalence => {
            expect_premises(rule, premises, 2)?;
            let (first, second) = (&premises[0], &premises[1]);
            let beta = first.conclusion();
            let alpha = second.conclusion();
            if !first.context_contains(alpha) || !second.context_contains(beta) {
                return Err(Error::shape(
                    "Equivalence",
                    "premises must have shape α,Γ:β and β,Γ:α",
                ));
            }
            let mut gamma = first.context_without(alpha);
            gamma.extend(second.context_without(beta));
            let check1 = {
                let mut c = gamma.clone();
                c.push(alpha.clone());
                Sequent::new(c, beta.clone())?
            };
            let check2 = {
                let mut c = gamma.clone();
                c.push(beta.clone());
                Sequent::new(c, alpha.clone())?
            };
            if check1.context != first.context || check2.context != second.context {
                return Err(Error::shape(
                    "Equivalence",
                    "premise contexts do not share a common Γ",
                ));
            }
            Sequent::new(gamma, sugar::iff(alpha.clone(), beta.clone())?)
        }
    }
}

// ---------------------------------------------------------------------------
// Proof trees and the checker
// ---------------------------------------------------------------------------

/// Derived rules that may remain as trusted nodes in extended mode. Each
/// carries exactly the parameters needed to re-validate its side
/// conditions.
#[derive(Clone, Debug)]
pub enum DerivedRule {
    /// 3.2.3(i): from `Γ:α` and `β,Γ:γ` conclude `α⇒β,Γ:γ`.
    ImpliesHyp { beta: Term },
    /// 3.4.2: from `Γ:α` conclude `Γ:∀xα` (x not free in Γ, or not in α).
    ForallIntro { var: Var },
    /// 3.4.3: from `Γ:{x:α}={x:β}` conclude `Γ:α⇔β` (x free in α or β).
    SetEqToIff,
    /// 3.4.4: `∀xα ⊢ α` (x free in α, or a closed term of its type).
    ForallElim { forall: Term },
    /// 3.7.1: `α ⊢ ∃xα` (x free in α, or a closed term of its type).
    ExistsIntro { var: Var, alpha: Term },
    /// 3.7.2: from `α,Γ:β` conclude `∃xα,Γ:β`.
    ExistsHyp { var: Var, alpha: Term },
    /// 3.7.4: from `Γ:α(x/τ)` conclude `Γ:∃xα`.
    ExistsIntroWitness { var: Var, alpha: Term, witness: Term },
    /// 3.7.6: `⊢ ∃x(α∧β) ⇔ α∧∃xβ` (x free in β, not in α).
    ExistsConjSlide { var: Var, alpha: Term, beta: Term },
    /// 3.7.8: unrestricted cut, given closed terms for the extra types.
    UnrestrictedCut,
}

impl DerivedRule {
    pub fn name(&self) -> &'static str {
        match self {
            DerivedRule::ImpliesHyp { .. } => "3.2.3",
            DerivedRule::ForallIntro { .. } => "3.4.2",
            DerivedRule::SetEqToIff => "3.4.3",
            DerivedRule::ForallElim { .. } => "3.4.4",
            DerivedRule::ExistsIntro { .. } => "3.7.1",
            DerivedRule::ExistsHyp { .. } => "3.7.2",
            DerivedRule::ExistsIntroWitness { .. } => "3.7.4",
            DerivedRule::ExistsConjSlide { .. } => "3.7.6",
            DerivedRule::UnrestrictedCut => "3.7.8",
        }
    }
}

#[derive(Clone, Debug)]
pub enum ProofTree {
    Axiom {
        axiom: BasicAxiom,
        seq: Sequent,
    },
    /// Leaf citing an axiom of the ambient theory by index.
    Hypothesis {
        index: usize,
        seq: Sequent,
    },
    Rule {
        rule: Rule,
        children: Vec<ProofTree>,
        seq: Sequent,
    },
    Derived {
        rule: DerivedRule,
        children: Vec<ProofTree>,
        seq: Sequent,
    },
}

impl ProofTree {
    pub fn sequent(&self) -> &Sequent {
        match self {
            ProofTree::Axiom { seq, .. }
            | ProofTree::Hypothesis { seq, .. }
            | ProofTree::Rule { seq, .. }
            | ProofTree::Derived { seq, .. } => seq,
        }
    }

    pub fn children(&self) -> &[ProofTree] {
        match self {
            ProofTree::Rule { children, .. } | ProofTree::Derived { children, .. } => children,
            _ => &[],
        }
    }

    /// Number of nodes, for reporting.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(ProofTree::size).sum::<usize>()
    }

    /// Rewrites every derived node into its primitive expansion, so the
    /// result passes the kernel-mode checker.
    pub fn expand_derived(&self, sig: &Signature) -> Result<ProofTree> {
        match self {
            ProofTree::Axiom { .. } | ProofTree::Hypothesis { .. } => Ok(self.clone()),
            ProofTree::Rule {
                rule,
                children,
                seq,
            } => {
                let children = children
                    .iter()
                    .map(|c| c.expand_derived(sig))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ProofTree::Rule {
                    rule: rule.clone(),
                    children,
                    seq: seq.clone(),
                })
            }
            ProofTree::Derived { rule, children, .. } => {
                let children = children
                    .iter()
                    .map(|c| c.expand_derived(sig))
                    .collect::<Result<Vec<_>>>()?;
                tactics::expand_kernel(sig, rule, children)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Primitive rules only; derived nodes are rejected.
    Kernel,
    /// Derived nodes are accepted after their side conditions re-validate.
    Extended,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Accepted(Sequent),
    Rejected { path: Vec<usize>, reason: Error },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }
}

/// Checks a proof tree against a theory: every leaf must be a basic-axiom
/// instance or an α-variant of a theory axiom, and every inner node must
/// re-validate under its rule. Rejection reports the node path (child
/// indices from the root) and the exact reason.
pub fn check_proof(theory: &Theory, proof: &ProofTree, mode: Mode) -> Verdict {
    let mut path = Vec::new();
    match check_node(theory, proof, mode, &mut path) {
        Ok(()) => Verdict::Accepted(proof.sequent().clone()),
        Err((path, reason)) => Verdict::Rejected { path, reason },
    }
}

type NodeFailure = (Vec<usize>, Error);

fn fail(path: &[usize], e: Error) -> NodeFailure {
    (path.to_vec(), e)
}

fn check_node(
    theory: &Theory,
    node: &ProofTree,
    mode: Mode,
    path: &mut Vec<usize>,
) -> std::result::Result<(), NodeFailure> {
    let seq = node.sequent();
    for f in seq.context().iter().chain(std::iter::once(seq.conclusion())) {
        theory
            .signature
            .validate_term(f)
            .map_err(|e| fail(path, e))?;
    }
    match node {
        ProofTree::Axiom { axiom, seq } => {
            let derived = basic_axiom(&theory.signature, axiom).map_err(|e| fail(path, e))?;
            if &derived != seq {
                return Err(fail(
                    path,
                    Error::shape(
                        axiom.schema_name(),
                        format!("label `{seq}` differs from instantiation `{derived}`"),
                    ),
                ));
            }
            Ok(())
        }
        ProofTree::Hypothesis { index, seq } => match theory.axioms.get(*index) {
            Some(ax) if ax == seq => Ok(()),
            Some(ax) => Err(fail(
                path,
                Error::shape(
                    "Hypothesis",
                    format!("label `{seq}` is not an α-variant of axiom {index} `{ax}`"),
                ),
            )),
            None => Err(fail(
                path,
                Error::Resolution(format!("theory has no axiom {index}")),
            )),
        },
        ProofTree::Rule {
            rule,
            children,
            seq,
        } => {
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                check_node(theory, child, mode, path)?;
                path.pop();
            }
            let premises: Vec<Sequent> =
                children.iter().map(|c| c.sequent().clone()).collect();
            let derived = apply_rule(&theory.signature, rule, &premises)
                .map_err(|e| fail(path, e))?;
            if &derived != seq {
                return Err(fail(
                    path,
                    Error::shape(
                        rule.name(),
                        format!("label `{seq}` differs from rule conclusion `{derived}`"),
                    ),
                ));
            }
            Ok(())
        }
        ProofTree::Derived {
            rule,
            children,
            seq,
        } => {
            if mode == Mode::Kernel {
                return Err(fail(
                    path,
                    Error::shape(
                        rule.name(),
                        "derived rule node in kernel mode; expand tactics first",
                    ),
                ));
            }
            for (i, child) in children.iter().enumerate() {
                path.push(i);
                check_node(theory, child, mode, path)?;
                path.pop();
            }
            let premises: Vec<Sequent> =
                children.iter().map(|c| c.sequent().clone()).collect();
            let derived = tactics::conclude(&theory.signature, rule, &premises)
                .map_err(|e| fail(path, e))?;
            if &derived != seq {
                return Err(fail(
                    path,
                    Error::shape(
                        rule.name(),
                        format!("label `{seq}` differs from derived conclusion `{derived}`"),
                    ),
                ));
            }
            Ok(())
        }
    }
}
