//! Surface syntax for types and terms: parsing from s-expressions (sugar
//! forms are expanded at load time) and the canonical printer, which
//! re-sugars recognizable expansion shapes for display.

use crate::error::{Error, Result};
use crate::language::{RawTerm, Signature, Term, TermKind, TypeExpr, Var};
use crate::sexpr::Sexp;
use crate::sugar;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

pub fn parse_type(sexp: &Sexp) -> Result<TypeExpr> {
    match sexp {
        Sexp::Sym(s) => match s.as_str() {
            "One" => Ok(TypeExpr::One),
            "Omega" => Ok(TypeExpr::Omega),
            _ => Ok(TypeExpr::ground(s.clone())),
        },
        Sexp::List(items) => match sexp.head() {
            Some("prod") => {
                let factors = items[1..]
                    .iter()
                    .map(parse_type)
                    .collect::<Result<Vec<_>>>()?;
                Ok(TypeExpr::product(factors))
            }
            Some("pow") => {
                if items.len() != 2 {
                    return Err(Error::Resolution("(pow T) takes one argument".into()));
                }
                Ok(TypeExpr::power(parse_type(&items[1])?))
            }
            _ => Err(Error::Resolution(format!("unrecognized type form: {sexp}"))),
        },
        Sexp::Int(_) => Err(Error::Resolution(format!("not a type: {sexp}"))),
    }
}

pub fn type_to_sexp(ty: &TypeExpr) -> Sexp {
    match ty {
        TypeExpr::One => Sexp::sym("One"),
        TypeExpr::Omega => Sexp::sym("Omega"),
        TypeExpr::Ground(g) => Sexp::sym(g.clone()),
        TypeExpr::Product(fs) => {
            let mut items = vec![Sexp::sym("prod")];
            items.extend(fs.iter().map(type_to_sexp));
            Sexp::List(items)
        }
        TypeExpr::Power(inner) => Sexp::List(vec![Sexp::sym("pow"), type_to_sexp(inner)]),
    }
}

// ---------------------------------------------------------------------------
// Terms
// ---------------------------------------------------------------------------

fn parse_binder(sexp: &Sexp) -> Result<Var> {
    let items = sexp
        .as_list()
        .filter(|l| l.len() == 2)
        .ok_or_else(|| Error::Resolution(format!("expected a binder (name type), got {sexp}")))?;
    let name = items[0]
        .as_sym()
        .ok_or_else(|| Error::Resolution(format!("binder name must be a symbol: {sexp}")))?;
    Ok(Var::new(name, parse_type(&items[1])?))
}

fn parse_binder_list(sexp: &Sexp) -> Result<Vec<Var>> {
    sexp.as_list()
        .ok_or_else(|| Error::Resolution(format!("expected a binder list, got {sexp}")))?
        .iter()
        .map(parse_binder)
        .collect()
}

fn arity(form: &str, items: &[Sexp], n: usize) -> Result<()> {
    if items.len() == n + 1 {
        Ok(())
    } else {
        Err(Error::Resolution(format!(
            "`{form}` takes {n} argument(s), got {}",
            items.len() - 1
        )))
    }
}

/// Parses a surface term over `sig`. Sugar forms are expanded eagerly so
/// the result is always a core [`Term`].
pub fn parse_term(sig: &Signature, sexp: &Sexp) -> Result<Term> {
    match sexp {
        Sexp::Sym(s) => match s.as_str() {
            "star" => Ok(Term::star()),
            "true" => Ok(sugar::tru()),
            "false" => Ok(sugar::fls()),
            _ => Err(Error::Resolution(format!(
                "bare symbol `{s}` is not a term; variables are written (var {s} T)"
            ))),
        },
        Sexp::Int(_) => Err(Error::Resolution(format!("not a term: {sexp}"))),
        Sexp::List(items) => {
            let head = sexp
                .head()
                .ok_or_else(|| Error::Resolution(format!("not a term form: {sexp}")))?;
            match head {
                "var" => {
                    arity("var", items, 2)?;
                    let name = items[1]
                        .as_sym()
                        .ok_or_else(|| Error::Resolution("variable name must be a symbol".into()))?;
                    let ty = parse_type(&items[2])?;
                    crate::language::typecheck(sig, &RawTerm::Var(name.into(), ty))
                }
                "app" => {
                    arity("app", items, 2)?;
                    let f = items[1]
                        .as_sym()
                        .ok_or_else(|| Error::Resolution("function name must be a symbol".into()))?;
                    sig.app(f, parse_term(sig, &items[2])?)
                }
                "tuple" => {
                    let parts = items[1..]
                        .iter()
                        .map(|i| parse_term(sig, i))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(Term::tuple(parts))
                }
                "proj" => {
                    arity("proj", items, 2)?;
                    let i = items[1]
                        .as_int()
                        .filter(|i| *i >= 1)
                        .ok_or_else(|| Error::Resolution("projection index must be >= 1".into()))?;
                    Term::proj(i as usize, parse_term(sig, &items[2])?)
                }
                "compr" => {
                    arity("compr", items, 2)?;
                    let v = parse_binder(&items[1])?;
                    sig.validate_type(&v.ty)?;
                    Term::compr(v, parse_term(sig, &items[2])?)
                }
                "eq" => {
                    arity("eq", items, 2)?;
                    Term::eq(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "mem" => {
                    arity("mem", items, 2)?;
                    Term::mem(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "iff" => {
                    arity("iff", items, 2)?;
                    sugar::iff(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "and" => {
                    arity("and", items, 2)?;
                    sugar::and(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "or" => {
                    arity("or", items, 2)?;
                    sugar::or(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "implies" => {
                    arity("implies", items, 2)?;
                    sugar::implies(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "not" => {
                    arity("not", items, 1)?;
                    sugar::not(parse_term(sig, &items[1])?)
                }
                "forall" => {
                    arity("forall", items, 2)?;
                    let v = parse_binder(&items[1])?;
                    sig.validate_type(&v.ty)?;
                    sugar::forall(v, parse_term(sig, &items[2])?)
                }
                "exists" => {
                    arity("exists", items, 2)?;
                    let v = parse_binder(&items[1])?;
                    sig.validate_type(&v.ty)?;
                    sugar::exists(v, parse_term(sig, &items[2])?)
                }
                "exists1" => {
                    arity("exists1", items, 2)?;
                    let v = parse_binder(&items[1])?;
                    sig.validate_type(&v.ty)?;
                    sugar::exists_unique(v, parse_term(sig, &items[2])?)
                }
                "forall-in" => {
                    arity("forall-in", items, 3)?;
                    let v = parse_binder(&items[1])?;
                    sugar::forall_in(v, parse_term(sig, &items[2])?, parse_term(sig, &items[3])?)
                }
                "exists-in" => {
                    arity("exists-in", items, 3)?;
                    let v = parse_binder(&items[1])?;
                    sugar::exists_in(v, parse_term(sig, &items[2])?, parse_term(sig, &items[3])?)
                }
                "exists1-in" => {
                    arity("exists1-in", items, 3)?;
                    let v = parse_binder(&items[1])?;
                    sugar::exists_unique_in(
                        v,
                        parse_term(sig, &items[2])?,
                        parse_term(sig, &items[3])?,
                    )
                }
                "compr-in" => {
                    arity("compr-in", items, 3)?;
                    let v = parse_binder(&items[1])?;
                    sugar::compr_in(v, parse_term(sig, &items[2])?, parse_term(sig, &items[3])?)
                }
                "universal" => {
                    arity("universal", items, 1)?;
                    let ty = parse_type(&items[1])?;
                    sig.validate_type(&ty)?;
                    Ok(sugar::universal_set(ty))
                }
                "empty" => {
                    arity("empty", items, 1)?;
                    let ty = parse_type(&items[1])?;
                    sig.validate_type(&ty)?;
                    Ok(sugar::empty_set(ty))
                }
                "singleton" => {
                    arity("singleton", items, 1)?;
                    Ok(sugar::singleton(parse_term(sig, &items[1])?))
                }
                "image" => {
                    arity("image", items, 3)?;
                    let binders = parse_binder_list(&items[1])?;
                    sugar::image_set(
                        &binders,
                        parse_term(sig, &items[2])?,
                        parse_term(sig, &items[3])?,
                    )
                }
                "graph" => {
                    arity("graph", items, 3)?;
                    let binders = parse_binder_list(&items[1])?;
                    sugar::graph_pair(
                        &binders,
                        parse_term(sig, &items[2])?,
                        parse_term(sig, &items[3])?,
                    )
                }
                "subset" => {
                    arity("subset", items, 2)?;
                    sugar::subset(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "intersect" => {
                    arity("intersect", items, 2)?;
                    sugar::intersection(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "union" => {
                    arity("union", items, 2)?;
                    sugar::union(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "setprod" => {
                    arity("setprod", items, 2)?;
                    sugar::set_product(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                "funspace" => {
                    arity("funspace", items, 2)?;
                    sugar::function_space(parse_term(sig, &items[1])?, parse_term(sig, &items[2])?)
                }
                other => Err(Error::Resolution(format!("unrecognized term form `{other}`"))),
            }
        }
    }
}

fn binder_sexp(v: &Var) -> Sexp {
    Sexp::List(vec![Sexp::sym(v.name.clone()), type_to_sexp(&v.ty)])
}

/// Canonical s-expression for a term, re-sugaring the (L1)-(L9) expansion
/// shapes and the universal/empty/singleton sets.
pub fn term_to_sexp(t: &Term) -> Sexp {
    if sugar::match_true(t) {
        return Sexp::sym("true");
    }
    if sugar::match_false(t) {
        return Sexp::sym("false");
    }
    if let Some(a) = sugar::match_not(t) {
        return Sexp::List(vec![Sexp::sym("not"), term_to_sexp(a)]);
    }
    if let Some((a, b)) = sugar::match_or(t) {
        return Sexp::List(vec![Sexp::sym("or"), term_to_sexp(a), term_to_sexp(b)]);
    }
    if let Some((x, a)) = sugar::match_exists(t) {
        return Sexp::List(vec![Sexp::sym("exists"), binder_sexp(x), term_to_sexp(a)]);
    }
    if let Some((a, b)) = sugar::match_implies(t) {
        return Sexp::List(vec![Sexp::sym("implies"), term_to_sexp(a), term_to_sexp(b)]);
    }
    if let Some((a, b)) = sugar::match_and(t) {
        return Sexp::List(vec![Sexp::sym("and"), term_to_sexp(a), term_to_sexp(b)]);
    }
    if let Some((x, a)) = sugar::match_forall(t) {
        return Sexp::List(vec![Sexp::sym("forall"), binder_sexp(x), term_to_sexp(a)]);
    }
    if let Some(x) = sugar::match_universal(t) {
        return Sexp::List(vec![Sexp::sym("universal"), type_to_sexp(&x.ty)]);
    }
    if let Some(x) = sugar::match_empty(t) {
        return Sexp::List(vec![Sexp::sym("empty"), type_to_sexp(&x.ty)]);
    }
    if let Some(inner) = sugar::match_singleton(t) {
        return Sexp::List(vec![Sexp::sym("singleton"), term_to_sexp(inner)]);
    }
    match t.kind() {
        TermKind::Star => Sexp::sym("star"),
        TermKind::Var(v) => Sexp::List(vec![
            Sexp::sym("var"),
            Sexp::sym(v.name.clone()),
            type_to_sexp(&v.ty),
        ]),
        TermKind::App(f, a) => Sexp::List(vec![
            Sexp::sym("app"),
            Sexp::sym(f.clone()),
            term_to_sexp(a),
        ]),
        TermKind::Tuple(parts) => {
            let mut items = vec![Sexp::sym("tuple")];
            items.extend(parts.iter().map(term_to_sexp));
            Sexp::List(items)
        }
        TermKind::Proj(i, a) => Sexp::List(vec![
            Sexp::sym("proj"),
            Sexp::Int(*i as i64),
            term_to_sexp(a),
        ]),
        TermKind::Compr(v, body) => Sexp::List(vec![
            Sexp::sym("compr"),
            binder_sexp(v),
            term_to_sexp(body),
        ]),
        TermKind::Eq(a, b) => {
            let head = if a.is_formula() { "iff" } else { "eq" };
            Sexp::List(vec![Sexp::sym(head), term_to_sexp(a), term_to_sexp(b)])
        }
        TermKind::Mem(a, b) => Sexp::List(vec![Sexp::sym("mem"), term_to_sexp(a), term_to_sexp(b)]),
    }
}

pub fn print_term(t: &Term) -> String {
    term_to_sexp(t).to_string()
}

pub fn print_type(ty: &TypeExpr) -> String {
    type_to_sexp(ty).to_string()
}
