//! Workspace files: a signature plus named axioms, terms, sequents,
//! functions, an optional finite interpretation, proofs and translation
//! requests, all in a deterministic s-expression format.
//!
//! Proof trees are stored without node labels; loading elaborates each
//! tree bottom-up through the same `basic_axiom` / `apply_rule` /
//! `conclude` calls the checker uses. A tree that fails to elaborate is
//! kept as a per-proof error so the driver can report it as a rejection
//! rather than refusing the whole file.

use std::collections::{BTreeMap, BTreeSet};

use crate::deduction::{
    basic_axiom, tactics, BasicAxiom, DerivedRule, ProofTree, Rule, Sequent,
};
use crate::error::{Error, Result};
use crate::finset::{Budget, FinInterpretation, Value};
use crate::language::{Signature, Term, TypeExpr, Var};
use crate::sexpr::{self, Sexp};
use crate::syntax::{parse_term, parse_type, term_to_sexp, type_to_sexp};

#[derive(Clone, Debug)]
pub struct FunctionEntry {
    pub graph: Term,
    pub dom: Term,
    pub cod: Term,
}

#[derive(Clone, Debug)]
pub struct TranslateRequest {
    pub function: String,
    pub theta: Term,
    pub source: Var,
    pub target: Var,
}

/// Ground carrier sizes and function tables by index, as written in the
/// file; realized into a [`FinInterpretation`] on demand.
#[derive(Clone, Debug, Default)]
pub struct InterpSpec {
    pub sizes: BTreeMap<String, usize>,
    pub tables: BTreeMap<String, Vec<usize>>,
}

impl InterpSpec {
    pub fn build(&self, sig: &Signature, budget: Budget) -> Result<FinInterpretation> {
        // Carriers are independent of tables; realize them against a
        // function-free copy of the signature first.
        let bare = Signature::new(sig.grounds().to_vec(), vec![], false)?;
        let skeleton =
            FinInterpretation::with_budget(bare, self.sizes.clone(), BTreeMap::new(), budget)?;
        let mut tables = BTreeMap::new();
        for (name, (arg_ty, res_ty)) in sig.fns() {
            let indices = self.tables.get(name).ok_or_else(|| {
                Error::MissingComponent(format!("no table for function symbol `{name}`"))
            })?;
            let dom = skeleton.carrier(arg_ty)?;
            let cod = skeleton.carrier(res_ty)?;
            if indices.len() != dom.len() {
                return Err(Error::IllTypedTable {
                    symbol: name.clone(),
                    detail: format!(
                        "table has {} entries but the domain carrier has {}",
                        indices.len(),
                        dom.len()
                    ),
                });
            }
            let values = indices
                .iter()
                .map(|i| {
                    cod.values.get(*i).cloned().ok_or_else(|| Error::IllTypedTable {
                        symbol: name.clone(),
                        detail: format!("index {i} exceeds the codomain carrier"),
                    })
                })
                .collect::<Result<Vec<Value>>>()?;
            tables.insert(name.clone(), values);
        }
        FinInterpretation::with_budget(sig.clone(), self.sizes.clone(), tables, budget)
    }
}

#[derive(Debug, Default)]
pub struct Workspace {
    pub signature: Signature,
    pub axioms: Vec<(String, Sequent)>,
    pub terms: Vec<(String, Term)>,
    pub sequents: Vec<(String, Sequent)>,
    pub functions: Vec<(String, FunctionEntry)>,
    pub proofs: Vec<(String, std::result::Result<ProofTree, Error>)>,
    pub interp: Option<InterpSpec>,
    pub translations: Vec<(String, TranslateRequest)>,
}

impl Default for Signature {
    fn default() -> Self {
        Signature::empty()
    }
}

impl Workspace {
    pub fn term(&self, name: &str) -> Option<&Term> {
        self.terms.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionEntry> {
        self.functions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, f)| f)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

fn expect_list<'a>(sexp: &'a Sexp, what: &str) -> Result<&'a [Sexp]> {
    sexp.as_list()
        .ok_or_else(|| Error::Resolution(format!("expected a {what} form, got {sexp}")))
}

fn expect_sym<'a>(sexp: &'a Sexp, what: &str) -> Result<&'a str> {
    sexp.as_sym()
        .ok_or_else(|| Error::Resolution(format!("expected a {what}, got {sexp}")))
}

fn parse_binder(sexp: &Sexp) -> Result<Var> {
    let items = expect_list(sexp, "binder")?;
    if items.len() != 2 {
        return Err(Error::Resolution(format!("expected (name type), got {sexp}")));
    }
    Ok(Var::new(expect_sym(&items[0], "name")?, parse_type(&items[1])?))
}

fn parse_signature(items: &[Sexp]) -> Result<Signature> {
    let mut grounds = Vec::new();
    let mut fns = Vec::new();
    let mut nullstellensatz = false;
    for entry in &items[1..] {
        let parts = expect_list(entry, "signature entry")?;
        match parts.first().and_then(Sexp::as_sym) {
            Some("ground") => {
                for g in &parts[1..] {
                    grounds.push(expect_sym(g, "ground name")?.to_string());
                }
            }
            Some("fn") => {
                if parts.len() != 4 {
                    return Err(Error::Resolution(
                        "(fn name (arg-types) result-type) expected".into(),
                    ));
                }
                let name = expect_sym(&parts[1], "function name")?.to_string();
                let args = expect_list(&parts[2], "argument type list")?
                    .iter()
                    .map(parse_type)
                    .collect::<Result<Vec<_>>>()?;
                let arg_ty = TypeExpr::product(args);
                let res_ty = parse_type(&parts[3])?;
                fns.push((name, arg_ty, res_ty));
            }
            Some("nullstellensatz") => nullstellensatz = true,
            _ => {
                return Err(Error::Resolution(format!(
                    "unrecognized signature entry {entry}"
                )))
            }
        }
    }
    Signature::new(grounds, fns, nullstellensatz)
}

fn parse_sequent(sig: &Signature, hyps: &Sexp, concl: &Sexp) -> Result<Sequent> {
    let hyp_terms = expect_list(hyps, "hypothesis list")?
        .iter()
        .map(|h| parse_term(sig, h))
        .collect::<Result<Vec<_>>>()?;
    Sequent::new(hyp_terms, parse_term(sig, concl)?)
}

fn parse_proof_tree(
    sig: &Signature,
    axioms: &[(String, Sequent)],
    sexp: &Sexp,
) -> Result<ProofTree> {
    let items = expect_list(sexp, "proof node")?;
    let head = items
        .first()
        .and_then(Sexp::as_sym)
        .ok_or_else(|| Error::Resolution(format!("not a proof node: {sexp}")))?;
    let arity = |n: usize| -> Result<()> {
        if items.len() == n + 1 {
            Ok(())
        } else {
            Err(Error::Resolution(format!(
                "`{head}` takes {n} argument(s), got {}",
                items.len() - 1
            )))
        }
    };
    let axiom_node = |axiom: BasicAxiom| -> Result<ProofTree> {
        let seq = basic_axiom(sig, &axiom)?;
        Ok(ProofTree::Axiom { axiom, seq })
    };
    let rule_node = |rule: Rule, children: Vec<ProofTree>| -> Result<ProofTree> {
        let premises: Vec<Sequent> = children.iter().map(|c| c.sequent().clone()).collect();
        let seq = crate::deduction::apply_rule(sig, &rule, &premises)?;
        Ok(ProofTree::Rule {
            rule,
            children,
            seq,
        })
    };
    match head {
        "taut" => {
            arity(1)?;
            axiom_node(BasicAxiom::Tautology {
                alpha: parse_term(sig, &items[1])?,
            })
        }
        "unity" => {
            arity(1)?;
            axiom_node(BasicAxiom::Unity {
                var: expect_sym(&items[1], "variable name")?.to_string(),
            })
        }
        "eq-axiom" => {
            arity(4)?;
            axiom_node(BasicAxiom::Equality {
                x: parse_binder(&items[1])?,
                y: parse_binder(&items[2])?,
                z: parse_binder(&items[3])?,
                alpha: parse_term(sig, &items[4])?,
            })
        }
        "proj-axiom" => {
            arity(2)?;
            let vars = expect_list(&items[1], "variable list")?
                .iter()
                .map(parse_binder)
                .collect::<Result<Vec<_>>>()?;
            let index = items[2]
                .as_int()
                .filter(|i| *i >= 1)
                .ok_or_else(|| Error::Resolution("projection index must be >= 1".into()))?;
            axiom_node(BasicAxiom::ProductProj {
                vars,
                index: index as usize,
            })
        }
        "pair-axiom" => {
            arity(1)?;
            axiom_node(BasicAxiom::ProductPair {
                var: parse_binder(&items[1])?,
            })
        }
        "compr-axiom" => {
            arity(2)?;
            axiom_node(BasicAxiom::Comprehension {
                var: parse_binder(&items[1])?,
                alpha: parse_term(sig, &items[2])?,
            })
        }
        "hyp" => {
            arity(1)?;
            let index = items[1]
                .as_int()
                .filter(|i| *i >= 0)
                .ok_or_else(|| Error::Resolution("hypothesis index must be >= 0".into()))?
                as usize;
            let seq = axioms
                .get(index)
                .map(|(_, s)| s.clone())
                .ok_or_else(|| Error::Resolution(format!("theory has no axiom {index}")))?;
            Ok(ProofTree::Hypothesis { index, seq })
        }
        "thin" => {
            arity(2)?;
            let formula = parse_term(sig, &items[1])?;
            let child = parse_proof_tree(sig, axioms, &items[2])?;
            rule_node(Rule::Thinning { formula }, vec![child])
        }
        "cut" => {
            arity(2)?;
            let c1 = parse_proof_tree(sig, axioms, &items[1])?;
            let c2 = parse_proof_tree(sig, axioms, &items[2])?;
            rule_node(Rule::Cut, vec![c1, c2])
        }
        "subst" => {
            arity(3)?;
            let var = parse_binder(&items[1])?;
            let term = parse_term(sig, &items[2])?;
            let child = parse_proof_tree(sig, axioms, &items[3])?;
            rule_node(Rule::Substitution { var, term }, vec![child])
        }
        "ext" => {
            arity(2)?;
            let var = parse_binder(&items[1])?;
            let child = parse_proof_tree(sig, axioms, &items[2])?;
            rule_node(Rule::Extensionality { var }, vec![child])
        }
        "equiv" => {
            arity(2)?;
            let c1 = parse_proof_tree(sig, axioms, &items[1])?;
            let c2 = parse_proof_tree(sig, axioms, &items[2])?;
            rule_node(Rule::Equivalence, vec![c1, c2])
        }
        "derived" => {
            if items.len() < 2 {
                return Err(Error::Resolution("(derived NAME ...) expected".into()));
            }
            let name = expect_sym(&items[1], "derived rule name")?;
            let rest = &items[2..];
            let (rule, child_forms): (DerivedRule, &[Sexp]) = match name {
                "3.2.3" => (
                    DerivedRule::ImpliesHyp {
                        beta: parse_term(sig, &rest[0])?,
                    },
                    &rest[1..],
                ),
                "3.4.2" => (
                    DerivedRule::ForallIntro {
                        var: parse_binder(&rest[0])?,
                    },
                    &rest[1..],
                ),
                "3.4.3" => (DerivedRule::SetEqToIff, rest),
                "3.4.4" => (
                    DerivedRule::ForallElim {
                        forall: parse_term(sig, &rest[0])?,
                    },
                    &rest[1..],
                ),
                "3.7.1" => (
                    DerivedRule::ExistsIntro {
                        var: parse_binder(&rest[0])?,
                        alpha: parse_term(sig, &rest[1])?,
                    },
                    &rest[2..],
                ),
                "3.7.2" => (
                    DerivedRule::ExistsHyp {
                        var: parse_binder(&rest[0])?,
                        alpha: parse_term(sig, &rest[1])?,
                    },
                    &rest[2..],
                ),
                "3.7.4" => (
                    DerivedRule::ExistsIntroWitness {
                        var: parse_binder(&rest[0])?,
                        alpha: parse_term(sig, &rest[1])?,
                        witness: parse_term(sig, &rest[2])?,
                    },
                    &rest[3..],
                ),
                "3.7.6" => (
                    DerivedRule::ExistsConjSlide {
                        var: parse_binder(&rest[0])?,
                        alpha: parse_term(sig, &rest[1])?,
                        beta: parse_term(sig, &rest[2])?,
                    },
                    &rest[3..],
                ),
                "3.7.8" => (DerivedRule::UnrestrictedCut, rest),
                other => {
                    return Err(Error::Resolution(format!(
                        "unknown derived rule `{other}`"
                    )))
                }
            };
            let children = child_forms
                .iter()
                .map(|c| parse_proof_tree(sig, axioms, c))
                .collect::<Result<Vec<_>>>()?;
            let premises: Vec<Sequent> = children.iter().map(|c| c.sequent().clone()).collect();
            let seq = tactics::conclude(sig, &rule, &premises)?;
            Ok(ProofTree::Derived {
                rule,
                children,
                seq,
            })
        }
        other => Err(Error::Resolution(format!("unknown proof form `{other}`"))),
    }
}

/// Parses a workspace file. The signature must be the first form; every
/// later entry is resolved against it.
pub fn parse(src: &str) -> Result<Workspace> {
    let forms = sexpr::parse_many(src)?;
    let mut ws = Workspace::default();
    let mut names = BTreeSet::<String>::new();
    let mut saw_sig = false;
    let mut unique = |name: &str| -> Result<String> {
        if !names.insert(name.to_string()) {
            return Err(Error::Resolution(format!("duplicate name `{name}`")));
        }
        Ok(name.to_string())
    };
    for form in &forms {
        let items = expect_list(form, "workspace entry")?;
        match items.first().and_then(Sexp::as_sym) {
            Some("sig") => {
                if saw_sig {
                    return Err(Error::Resolution("signature declared twice".into()));
                }
                ws.signature = parse_signature(items)?;
                saw_sig = true;
            }
            Some(kind) => {
                if !saw_sig {
                    return Err(Error::Resolution(
                        "the signature must come before all other entries".into(),
                    ));
                }
                match kind {
                    "axiom" => {
                        if items.len() != 4 {
                            return Err(Error::Resolution(
                                "(axiom name (hyps...) concl) expected".into(),
                            ));
                        }
                        let name = unique(expect_sym(&items[1], "axiom name")?)?;
                        let seq = parse_sequent(&ws.signature, &items[2], &items[3])?;
                        ws.axioms.push((name, seq));
                    }
                    "term" => {
                        if items.len() != 3 {
                            return Err(Error::Resolution("(term name TERM) expected".into()));
                        }
                        let name = unique(expect_sym(&items[1], "term name")?)?;
                        ws.terms.push((name, parse_term(&ws.signature, &items[2])?));
                    }
                    "sequent" => {
                        if items.len() != 4 {
                            return Err(Error::Resolution(
                                "(sequent name (hyps...) concl) expected".into(),
                            ));
                        }
                        let name = unique(expect_sym(&items[1], "sequent name")?)?;
                        let seq = parse_sequent(&ws.signature, &items[2], &items[3])?;
                        ws.sequents.push((name, seq));
                    }
                    "function" => {
                        if items.len() != 5 {
                            return Err(Error::Resolution(
                                "(function name GRAPH DOM COD) expected".into(),
                            ));
                        }
                        let name = unique(expect_sym(&items[1], "function name")?)?;
                        ws.functions.push((
                            name,
                            FunctionEntry {
                                graph: parse_term(&ws.signature, &items[2])?,
                                dom: parse_term(&ws.signature, &items[3])?,
                                cod: parse_term(&ws.signature, &items[4])?,
                            },
                        ));
                    }
                    "interp" => {
                        if ws.interp.is_some() {
                            return Err(Error::Resolution(
                                "interpretation declared twice".into(),
                            ));
                        }
                        let mut spec = InterpSpec::default();
                        for entry in &items[1..] {
                            let parts = expect_list(entry, "interp entry")?;
                            match parts.first().and_then(Sexp::as_sym) {
                                Some("carrier") => {
                                    if parts.len() != 3 {
                                        return Err(Error::Resolution(
                                            "(carrier G n) expected".into(),
                                        ));
                                    }
                                    let g = expect_sym(&parts[1], "ground name")?;
                                    let n = parts[2].as_int().filter(|n| *n >= 0).ok_or_else(
                                        || Error::Resolution("carrier size must be >= 0".into()),
                                    )?;
                                    spec.sizes.insert(g.to_string(), n as usize);
                                }
                                Some("table") => {
                                    if parts.len() < 2 {
                                        return Err(Error::Resolution(
                                            "(table f i...) expected".into(),
                                        ));
                                    }
                                    let f = expect_sym(&parts[1], "function name")?;
                                    let idx = parts[2..]
                                        .iter()
                                        .map(|i| {
                                            i.as_int().filter(|i| *i >= 0).map(|i| i as usize)
                                        })
                                        .collect::<Option<Vec<_>>>()
                                        .ok_or_else(|| {
                                            Error::Resolution(
                                                "table entries must be indices".into(),
                                            )
                                        })?;
                                    spec.tables.insert(f.to_string(), idx);
                                }
                                _ => {
                                    return Err(Error::Resolution(format!(
                                        "unrecognized interp entry {entry}"
                                    )))
                                }
                            }
                        }
                        ws.interp = Some(spec);
                    }
                    "proof" => {
                        if items.len() != 3 {
                            return Err(Error::Resolution("(proof name TREE) expected".into()));
                        }
                        let name = unique(expect_sym(&items[1], "proof name")?)?;
                        let tree = parse_proof_tree(&ws.signature, &ws.axioms, &items[2]);
                        ws.proofs.push((name, tree));
                    }
                    "translate" => {
                        if items.len() != 6 {
                            return Err(Error::Resolution(
                                "(translate name f THETA (y TY) (x TY)) expected".into(),
                            ));
                        }
                        let name = unique(expect_sym(&items[1], "translation name")?)?;
                        let function = expect_sym(&items[2], "function name")?.to_string();
                        if ws.function(&function).is_none() {
                            return Err(Error::Resolution(format!(
                                "translate refers to unknown function `{function}`"
                            )));
                        }
                        let theta = parse_term(&ws.signature, &items[3])?;
                        let source = parse_binder(&items[4])?;
                        let target = parse_binder(&items[5])?;
                        ws.translations.push((
                            name,
                            TranslateRequest {
                                function,
                                theta,
                                source,
                                target,
                            },
                        ));
                    }
                    other => {
                        return Err(Error::Resolution(format!(
                            "unrecognized workspace entry `{other}`"
                        )))
                    }
                }
            }
            None => return Err(Error::Resolution(format!("not a workspace entry: {form}"))),
        }
    }
    if !saw_sig {
        return Err(Error::MissingComponent("workspace has no signature".into()));
    }
    Ok(ws)
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn binder_sexp(v: &Var) -> Sexp {
    Sexp::List(vec![Sexp::sym(v.name.clone()), type_to_sexp(&v.ty)])
}

fn sequent_sexps(seq: &Sequent) -> (Sexp, Sexp) {
    let hyps = Sexp::List(seq.context().iter().map(term_to_sexp).collect());
    (hyps, term_to_sexp(seq.conclusion()))
}

fn proof_to_sexp(tree: &ProofTree) -> Sexp {
    match tree {
        ProofTree::Axiom { axiom, .. } => match axiom {
            BasicAxiom::Tautology { alpha } => {
                Sexp::List(vec![Sexp::sym("taut"), term_to_sexp(alpha)])
            }
            BasicAxiom::Unity { var } => {
                Sexp::List(vec![Sexp::sym("unity"), Sexp::sym(var.clone())])
            }
            BasicAxiom::Equality { x, y, z, alpha } => Sexp::List(vec![
                Sexp::sym("eq-axiom"),
                binder_sexp(x),
                binder_sexp(y),
                binder_sexp(z),
                term_to_sexp(alpha),
            ]),
            BasicAxiom::ProductProj { vars, index } => Sexp::List(vec![
                Sexp::sym("proj-axiom"),
                Sexp::List(vars.iter().map(binder_sexp).collect()),
                Sexp::Int(*index as i64),
            ]),
            BasicAxiom::ProductPair { var } => {
                Sexp::List(vec![Sexp::sym("pair-axiom"), binder_sexp(var)])
            }
            BasicAxiom::Comprehension { var, alpha } => Sexp::List(vec![
                Sexp::sym("compr-axiom"),
                binder_sexp(var),
                term_to_sexp(alpha),
            ]),
        },
        ProofTree::Hypothesis { index, .. } => {
            Sexp::List(vec![Sexp::sym("hyp"), Sexp::Int(*index as i64)])
        }
        ProofTree::Rule { rule, children, .. } => {
            let kids: Vec<Sexp> = children.iter().map(proof_to_sexp).collect();
            match rule {
                Rule::Thinning { formula } => Sexp::List(
                    [Sexp::sym("thin"), term_to_sexp(formula)]
                        .into_iter()
                        .chain(kids)
                        .collect(),
                ),
                Rule::Cut => Sexp::List(
                    std::iter::once(Sexp::sym("cut")).chain(kids).collect(),
                ),
                Rule::Substitution { var, term } => Sexp::List(
                    [Sexp::sym("subst"), binder_sexp(var), term_to_sexp(term)]
                        .into_iter()
                        .chain(kids)
                        .collect(),
                ),
                Rule::Extensionality { var } => Sexp::List(
                    [Sexp::sym("ext"), binder_sexp(var)]
                        .into_iter()
                        .chain(kids)
                        .collect(),
                ),
                Rule::Equivalence => Sexp::List(
                    std::iter::once(Sexp::sym("equiv")).chain(kids).collect(),
                ),
            }
        }
        ProofTree::Derived { rule, children, .. } => {
            let kids: Vec<Sexp> = children.iter().map(proof_to_sexp).collect();
            let mut head = vec![Sexp::sym("derived"), Sexp::sym(rule.name())];
            match rule {
                DerivedRule::ImpliesHyp { beta } => head.push(term_to_sexp(beta)),
                DerivedRule::ForallIntro { var } => head.push(binder_sexp(var)),
                DerivedRule::SetEqToIff | DerivedRule::UnrestrictedCut => {}
                DerivedRule::ForallElim { forall } => head.push(term_to_sexp(forall)),
                DerivedRule::ExistsIntro { var, alpha } => {
                    head.push(binder_sexp(var));
                    head.push(term_to_sexp(alpha));
                }
                DerivedRule::ExistsHyp { var, alpha } => {
                    head.push(binder_sexp(var));
                    head.push(term_to_sexp(alpha));
                }
                DerivedRule::ExistsIntroWitness {
                    var,
                    alpha,
                    witness,
                } => {
                    head.push(binder_sexp(var));
                    head.push(term_to_sexp(alpha));
                    head.push(term_to_sexp(witness));
                }
                DerivedRule::ExistsConjSlide { var, alpha, beta } => {
                    head.push(binder_sexp(var));
                    head.push(term_to_sexp(alpha));
                    head.push(term_to_sexp(beta));
                }
            }
            head.extend(kids);
            Sexp::List(head)
        }
    }
}

/// Canonical print of a workspace: one form per line, in a fixed order of
/// kinds, preserving declaration order within each kind.
pub fn print(ws: &Workspace) -> String {
    let mut lines: Vec<String> = Vec::new();
    {
        let mut entries = vec![Sexp::sym("sig")];
        if !ws.signature.grounds().is_empty() {
            let mut g = vec![Sexp::sym("ground")];
            g.extend(ws.signature.grounds().iter().map(|s| Sexp::sym(s.clone())));
            entries.push(Sexp::List(g));
        }
        for (name, (arg, res)) in ws.signature.fns() {
            let args = Sexp::List(arg.factors().iter().map(type_to_sexp).collect());
            entries.push(Sexp::List(vec![
                Sexp::sym("fn"),
                Sexp::sym(name.clone()),
                args,
                type_to_sexp(res),
            ]));
        }
        if ws.signature.nullstellensatz() {
            entries.push(Sexp::List(vec![Sexp::sym("nullstellensatz")]));
        }
        lines.push(Sexp::List(entries).to_string());
    }
    for (name, seq) in &ws.axioms {
        let (hyps, concl) = sequent_sexps(seq);
        lines.push(
            Sexp::List(vec![Sexp::sym("axiom"), Sexp::sym(name.clone()), hyps, concl])
                .to_string(),
        );
    }
    for (name, term) in &ws.terms {
        lines.push(
            Sexp::List(vec![
                Sexp::sym("term"),
                Sexp::sym(name.clone()),
                term_to_sexp(term),
            ])
            .to_string(),
        );
    }
    for (name, seq) in &ws.sequents {
        let (hyps, concl) = sequent_sexps(seq);
        lines.push(
            Sexp::List(vec![
                Sexp::sym("sequent"),
                Sexp::sym(name.clone()),
                hyps,
                concl,
            ])
            .to_string(),
        );
    }
    for (name, f) in &ws.functions {
        lines.push(
            Sexp::List(vec![
                Sexp::sym("function"),
                Sexp::sym(name.clone()),
                term_to_sexp(&f.graph),
                term_to_sexp(&f.dom),
                term_to_sexp(&f.cod),
            ])
            .to_string(),
        );
    }
    if let Some(spec) = &ws.interp {
        let mut entries = vec![Sexp::sym("interp")];
        for (g, n) in &spec.sizes {
            entries.push(Sexp::List(vec![
                Sexp::sym("carrier"),
                Sexp::sym(g.clone()),
                Sexp::Int(*n as i64),
            ]));
        }
        for (f, idx) in &spec.tables {
            let mut t = vec![Sexp::sym("table"), Sexp::sym(f.clone())];
            t.extend(idx.iter().map(|i| Sexp::Int(*i as i64)));
            entries.push(Sexp::List(t));
        }
        lines.push(Sexp::List(entries).to_string());
    }
    for (name, tree) in &ws.proofs {
        if let Ok(tree) = tree {
            lines.push(
                Sexp::List(vec![
                    Sexp::sym("proof"),
                    Sexp::sym(name.clone()),
                    proof_to_sexp(tree),
                ])
                .to_string(),
            );
        }
    }
    for (name, req) in &ws.translations {
        lines.push(
            Sexp::List(vec![
                Sexp::sym("translate"),
                Sexp::sym(name.clone()),
                Sexp::sym(req.function.clone()),
                term_to_sexp(&req.theta),
                binder_sexp(&req.source),
                binder_sexp(&req.target),
            ])
            .to_string(),
        );
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
; a small workspace
(sig (ground A B) (fn f (A) B) (fn a () A))
(axiom ax0 () (eq (app a star) (app a star)))
(term t0 (forall (x A) (eq (app f (var x A)) (app f (var x A)))))
(sequent s0 ((mem (var x A) (universal A))) (eq (var x A) (var x A)))
(function idA (graph ((x A)) (var x A) (universal A)) (universal A) (universal A))
(interp (carrier A 2) (carrier B 1) (table f 0 0) (table a 0))
(proof p0 (subst (x1 One) star (unity x1)))
(translate tr0 idA (eq (var y A) (var y A)) (y A) (x A))
"#;

    #[test]
    fn parse_and_reprint_is_stable() {
        let ws = parse(SAMPLE).unwrap();
        assert_eq!(ws.signature.grounds(), &["A".to_string(), "B".to_string()]);
        assert_eq!(ws.axioms.len(), 1);
        assert_eq!(ws.terms.len(), 1);
        assert_eq!(ws.proofs.len(), 1);
        assert!(ws.proofs[0].1.is_ok());
        let printed = print(&ws);
        let ws2 = parse(&printed).unwrap();
        let printed2 = print(&ws2);
        assert_eq!(printed, printed2, "print ∘ parse ∘ print must equal print");
    }

    #[test]
    fn spec_example_signature() {
        let ws = parse("(sig (ground A) (fn f (A) Omega))").unwrap();
        assert_eq!(ws.signature.grounds().len(), 1);
        assert_eq!(ws.signature.fns().count(), 1);
        let (arg, res) = ws.signature.fn_sig("f").unwrap();
        assert_eq!(arg, &TypeExpr::ground("A"));
        assert_eq!(res, &TypeExpr::Omega);
    }

    #[test]
    fn malformed_parenthesis_is_a_syntax_error() {
        let err = parse("(sig (ground A)").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = parse("(sig (ground A)) (term t star) (term t star)").unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
    }

    #[test]
    fn interp_builds() {
        let ws = parse(SAMPLE).unwrap();
        let interp = ws
            .interp
            .as_ref()
            .unwrap()
            .build(&ws.signature, Budget::default())
            .unwrap();
        assert_eq!(interp.ground_size("A"), Some(2));
        // Table of `a` sends * to the first element of A.
        assert_eq!(interp.table("a").unwrap()[0], Value::Atom(0, 0));
    }

    #[test]
    fn unity_substitution_proof_checks_from_file() {
        let ws = parse(SAMPLE).unwrap();
        let theory = crate::deduction::Theory::new(
            ws.signature.clone(),
            ws.axioms.iter().map(|(_, s)| s.clone()).collect(),
        )
        .unwrap();
        let tree = ws.proofs[0].1.as_ref().unwrap();
        let verdict = crate::deduction::check_proof(&theory, tree, crate::deduction::Mode::Kernel);
        match verdict {
            crate::deduction::Verdict::Accepted(seq) => {
                assert_eq!(seq.conclusion(), &crate::sugar::tru());
            }
            crate::deduction::Verdict::Rejected { path, reason } => {
                panic!("rejected at {path:?}: {reason}")
            }
        }
    }
}
