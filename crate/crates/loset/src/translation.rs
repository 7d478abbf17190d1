//! Preimage translations with their right adjoint, term representation of
//! functions out of universal sets, the internal language of a finite
//! model, the canonical parameterization `f*`, and the appendix
//! equivalence `ρ`.
//!
//! Two routes to the translate are kept deliberately separate: the
//! canonical output of [`preimage_translate`] is the existential form
//! `∃y(⟨x,y⟩∈|f| ∧ θ)`, while [`preimage_translate_definitional`] builds
//! the composite arrow `⟦θ⟧∘(1×i_Y)∘(1×f)` syntactically and applies `♮`.
//! Their semantic equivalence is a test, never an assumption.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::finset::{Budget, FinInterpretation, Value};
use crate::language::{fresh_var, Signature, Term, TermKind, TypeExpr, Var};
use crate::settheory::{
    compose_unchecked, inclusion, inverse, mk_sfunction, natural_at, product_fn, represent,
    sset_eq, LSet, SFunction,
};
use crate::sugar;

// ---------------------------------------------------------------------------
// Preimage translation and its adjoint
// ---------------------------------------------------------------------------

/// A translated formula along with the variables involved: the companions
/// `y₁,…,yₙ`, the source variable replaced, and the new target variable.
#[derive(Clone, Debug)]
pub struct TranslationResult {
    pub formula: Term,
    pub companions: Vec<Var>,
    pub source_var: Var,
    pub target_var: Var,
}

fn check_translation_vars(f: &SFunction, theta: &Term, y: &Var, x: &Var) -> Result<Vec<Var>> {
    if &y.ty != f.cod().elem_ty() {
        return Err(Error::TypeMismatch(format!(
            "y has type {}, codomain elements have type {}",
            y.ty,
            f.cod().elem_ty()
        )));
    }
    if &x.ty != f.dom().elem_ty() {
        return Err(Error::TypeMismatch(format!(
            "x has type {}, domain elements have type {}",
            x.ty,
            f.dom().elem_ty()
        )));
    }
    if theta.free_vars().contains(x) {
        return Err(Error::VariableClash(format!(
            "x = `{}` must not occur free in θ",
            x.name
        )));
    }
    if x == y {
        return Err(Error::VariableClash(
            "x and y must be distinct variables".into(),
        ));
    }
    let companions: Vec<Var> = theta
        .free_vars()
        .iter()
        .filter(|v| *v != y)
        .cloned()
        .collect();
    if companions.contains(x) {
        return Err(Error::VariableClash(format!(
            "x = `{}` collides with a companion variable of θ",
            x.name
        )));
    }
    Ok(companions)
}

/// The preimage translation in its canonical form
/// `θ^♮ = ∃y(⟨x,y⟩∈|f| ∧ θ)`.
pub fn preimage_translate(
    f: &SFunction,
    theta: &Term,
    y: &Var,
    x: &Var,
) -> Result<TranslationResult> {
    let companions = check_translation_vars(f, theta, y, x)?;
    let pair = f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?;
    let formula = sugar::exists(y.clone(), sugar::and(pair, theta.clone())?)?;
    Ok(TranslationResult {
        formula,
        companions,
        source_var: y.clone(),
        target_var: x.clone(),
    })
}

/// The preimage translation built from its definition:
/// `(⟦θ⟧_{K,y} ∘ 1×i_Y ∘ 1×f)^♮(x)`, with the interpretation arrow, the
/// inclusion, the product functions and the composites all constructed
/// syntactically through their graphs.
pub fn preimage_translate_definitional(
    interp: &FinInterpretation,
    f: &SFunction,
    theta: &Term,
    y: &Var,
    x: &Var,
) -> Result<TranslationResult> {
    preimage_translate_definitional_with(interp, f, theta, y, x, &[])
}

/// As [`preimage_translate_definitional`], but with the companion sequence
/// enlarged by `extra` superfluous variables.
pub fn preimage_translate_definitional_with(
    interp: &FinInterpretation,
    f: &SFunction,
    theta: &Term,
    y: &Var,
    x: &Var,
    extra: &[Var],
) -> Result<TranslationResult> {
    let mut companions = check_translation_vars(f, theta, y, x)?;
    for v in extra {
        if v == x || v == y {
            return Err(Error::VariableClash(format!(
                "superfluous variable `{}` collides with x or y",
                v.name
            )));
        }
        if !companions.contains(v) {
            companions.push(v.clone());
        }
    }
    companions.sort();
    let omega = LSet::universal(TypeExpr::Omega);

    // The companion list y₁,…,yₙ,y and its x-variant.
    let mut ys = companions.clone();
    ys.push(y.clone());
    let mut xs = companions.clone();
    xs.push(x.clone());

    // ⟦θ⟧_{K,y} : U_{A₁}×⋯×U_{Aₙ}×U_B → Ω, as the graph of (⟨y⟩ ↦ θ).
    let universal_sets: Vec<Term> = ys
        .iter()
        .map(|v| sugar::universal_set(v.ty.clone()))
        .collect();
    let full_domain = LSet::new(sugar::set_product_n(&universal_sets)?)?;
    let k_theta = represent(interp, &ys, theta.clone(), &full_domain, &omega)?;

    // 1×f and 1×i_Y (identities on the companion coordinates).
    let i_y = inclusion(interp, f.cod())?;
    let (one_f, one_iy) = if companions.is_empty() {
        (f.clone(), i_y)
    } else {
        let mut ids = Vec::new();
        for v in &companions {
            let u = LSet::universal(v.ty.clone());
            let w = fresh_var("a", v.ty.clone(), &crate::language::all_names(&[theta]));
            ids.push(represent(interp, &[w.clone()], Term::var(w), &u, &u)?);
        }
        let mut with_f = ids.clone();
        with_f.push(f.clone());
        let mut with_iy = ids;
        with_iy.push(i_y);
        (product_fn(&with_f)?, product_fn(&with_iy)?)
    };

    let composite = compose_unchecked(&k_theta, &compose_unchecked(&one_iy, &one_f)?)?;
    let arg = Term::tuple(xs.iter().map(|v| Term::var(v.clone())).collect());
    let formula = natural_at(&composite, arg)?;
    Ok(TranslationResult {
        formula,
        companions,
        source_var: y.clone(),
        target_var: x.clone(),
    })
}

/// The right adjoint of the correstricted translator:
/// `𝔼_f(ξ) = ⟨x,y⟩∈|f| ⇒ ξ`.
pub fn e_f(f: &SFunction, xi: &Term, x: &Var, y: &Var) -> Result<Term> {
    if &x.ty != f.dom().elem_ty() || &y.ty != f.cod().elem_ty() {
        return Err(Error::TypeMismatch(
            "E_f requires x of domain element type and y of codomain element type".into(),
        ));
    }
    if !xi.is_formula() {
        return Err(Error::TypeMismatch(format!(
            "E_f requires a formula, got type {}",
            xi.ty()
        )));
    }
    let pair = f.pair_in_graph(Term::var(x.clone()), Term::var(y.clone()))?;
    sugar::implies(pair, xi.clone())
}

// ---------------------------------------------------------------------------
// Internal language of a finite model
// ---------------------------------------------------------------------------

/// A declared S-set inside an internal language: its own ground type, the
/// auto-registered inclusion symbol, and the semantic extension.
#[derive(Clone, Debug)]
pub struct SSetDecl {
    pub name: String,
    pub ground: TypeExpr,
    pub incl: String,
    pub set: LSet,
    pub extension: Vec<Value>,
}

impl SSetDecl {
    pub fn universe(&self) -> LSet {
        LSet::universal(self.ground.clone())
    }
}

/// The internal language of a concrete finite model: one ground type per
/// declared object, one function symbol per declared arrow, plus the
/// induced interpretation assigning each symbol its own carrier or table.
pub struct InternalLanguage {
    ground_sizes: BTreeMap<String, usize>,
    tables: BTreeMap<String, Vec<Value>>,
    sig: Signature,
    budget: Budget,
    interp: FinInterpretation,
    gensym: usize,
}

/// Builds the internal language of a finite model given by named objects
/// (carrier sizes) and named arrows (tables of codomain indices).
pub fn internal_language(
    objects: &[(&str, usize)],
    arrows: &[(&str, &str, &str, Vec<usize>)],
) -> Result<InternalLanguage> {
    let mut sig = Signature::empty();
    let mut sizes = BTreeMap::new();
    for (name, size) in objects {
        sig.add_ground(*name)?;
        sizes.insert(name.to_string(), *size);
    }
    let mut tables = BTreeMap::new();
    for (name, dom, cod, table) in arrows {
        let dom_ty = TypeExpr::ground(*dom);
        let cod_ty = TypeExpr::ground(*cod);
        sig.add_fn(*name, dom_ty, cod_ty)?;
        let cod_index = sig.ground_index(cod).ok_or_else(|| Error::IllTypedTable {
            symbol: name.to_string(),
            detail: format!("unknown codomain object `{cod}`"),
        })? as u32;
        let cod_size = sizes[&cod.to_string()];
        let values = table
            .iter()
            .map(|i| {
                if *i < cod_size {
                    Ok(Value::Atom(cod_index, *i as u32))
                } else {
                    Err(Error::IllTypedTable {
                        symbol: name.to_string(),
                        detail: format!("index {i} exceeds |{cod}| = {cod_size}"),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        tables.insert(name.to_string(), values);
    }
    let budget = Budget::default();
    let interp = FinInterpretation::with_budget(sig.clone(), sizes.clone(), tables.clone(), budget)?;
    Ok(InternalLanguage {
        ground_sizes: sizes,
        tables,
        sig,
        budget,
        interp,
        gensym: 0,
    })
}

impl InternalLanguage {
    pub fn interp(&self) -> &FinInterpretation {
        &self.interp
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn set_budget(&mut self, budget: Budget) -> Result<()> {
        self.budget = budget;
        self.rebuild()
    }

    fn rebuild(&mut self) -> Result<()> {
        self.interp = FinInterpretation::with_budget(
            self.sig.clone(),
            self.ground_sizes.clone(),
            self.tables.clone(),
            self.budget,
        )?;
        Ok(())
    }

    /// A symbol name of the form `{base}{k}` not yet declared.
    pub fn fresh_symbol(&mut self, base: &str) -> String {
        loop {
            let name = format!("{base}{}", self.gensym);
            self.gensym += 1;
            if self.sig.fn_sig(&name).is_err() && self.sig.ground_index(&name).is_none() {
                return name;
            }
        }
    }

    /// Registers an arrow with an arbitrary (already-valid) domain and
    /// codomain type and an explicit value table.
    pub fn add_arrow(
        &mut self,
        name: &str,
        dom_ty: TypeExpr,
        cod_ty: TypeExpr,
        table: Vec<Value>,
    ) -> Result<()> {
        self.sig.add_fn(name, dom_ty, cod_ty)?;
        self.tables.insert(name.to_string(), table);
        self.rebuild()
    }

    /// Declares an S-set: adds the ground type symbol for it and the
    /// inclusion arrow `i_X`, whose table is computed from the semantic
    /// extension of the defining L-set.
    pub fn declare_sset(&mut self, name: &str, set: &LSet) -> Result<SSetDecl> {
        self.sig.validate_term(set.term())?;
        let extension = match self.interp.eval_closed(set.term())? {
            Value::Set(items) => items,
            other => {
                return Err(Error::TypeMismatch(format!(
                    "L-set evaluated to a non-set value {other:?}"
                )))
            }
        };
        self.sig.add_ground(name)?;
        self.ground_sizes.insert(name.to_string(), extension.len());
        let incl = format!("i_{name}");
        self.sig.add_fn(
            &incl,
            TypeExpr::ground(name),
            set.elem_ty().clone(),
        )?;
        self.tables.insert(incl.clone(), extension.clone());
        self.rebuild()?;
        Ok(SSetDecl {
            name: name.to_string(),
            ground: TypeExpr::ground(name),
            incl,
            set: set.clone(),
            extension,
        })
    }

    /// Declares the function symbol for an S-function between declared
    /// S-sets, with its table conjugated through the inclusion tables.
    pub fn declare_arrow(
        &mut self,
        name: &str,
        f: &SFunction,
        dom: &SSetDecl,
        cod: &SSetDecl,
    ) -> Result<()> {
        if !sset_eq(&self.interp, f.dom(), &dom.set)? || !sset_eq(&self.interp, f.cod(), &cod.set)?
        {
            return Err(Error::TypeMismatch(format!(
                "`{name}` does not run between the declared S-sets"
            )));
        }
        let pairs = self.graph_pairs(f)?;
        let cod_index = self.sig.ground_index(&cod.name).unwrap() as u32;
        let mut table = Vec::with_capacity(dom.extension.len());
        for v in &dom.extension {
            let w = pairs
                .iter()
                .find(|(a, _)| a == v)
                .map(|(_, b)| b.clone())
                .ok_or_else(|| Error::NotTotal(format!("arrow `{name}`")))?;
            let pos = cod
                .extension
                .iter()
                .position(|c| c == &w)
                .ok_or_else(|| Error::NotInCodomain(format!("arrow `{name}`")))?;
            table.push(Value::Atom(cod_index, pos as u32));
        }
        self.add_arrow(name, dom.ground.clone(), cod.ground.clone(), table)
    }

    /// The pairs of a function's graph, evaluated.
    pub fn graph_pairs(&self, f: &SFunction) -> Result<Vec<(Value, Value)>> {
        match self.interp.eval_closed(f.graph().term())? {
            Value::Set(items) => items
                .into_iter()
                .map(|p| match p {
                    Value::Tuple(mut ab) if ab.len() == 2 => {
                        let b = ab.pop().unwrap();
                        let a = ab.pop().unwrap();
                        Ok((a, b))
                    }
                    other => Err(Error::TypeMismatch(format!(
                        "graph element {other:?} is not a pair"
                    ))),
                })
                .collect(),
            other => Err(Error::TypeMismatch(format!(
                "graph evaluated to a non-set value {other:?}"
            ))),
        }
    }

    /// `r_X : U_𝐗 → X`, the correstriction of `(u ↦ i_X(u))` to `X`.
    pub fn r_x(&self, decl: &SSetDecl) -> Result<SFunction> {
        let u = fresh_var("u", decl.ground.clone(), &crate::language::all_names(&[decl.set.term()]));
        let body = self.sig.app(&decl.incl, Term::var(u.clone()))?;
        represent(&self.interp, &[u], body, &decl.universe(), &decl.set)
    }

    /// Registers the characteristic arrow of a monic declared arrow and
    /// returns its symbol name.
    pub fn chi(&mut self, m: &str) -> Result<String> {
        let (dom_ty, cod_ty) = {
            let (a, b) = self.sig.fn_sig(m)?;
            (a.clone(), b.clone())
        };
        let table = self.tables.get(m).cloned().ok_or_else(|| {
            Error::MissingComponent(format!("no table for `{m}`"))
        })?;
        let dom = self.interp.carrier(&dom_ty)?;
        let cod = self.interp.carrier(&cod_ty)?;
        let arrow = crate::finset::FinArrow::new(dom.values.clone(), cod.values.clone(), table)?;
        let chi = crate::finset::char_of(&arrow)?;
        let name = format!("chi_{m}");
        self.add_arrow(&name, cod_ty, TypeExpr::Omega, chi.table)?;
        Ok(name)
    }
}

// ---------------------------------------------------------------------------
// τ_f: term representation of functions out of universal sets
// ---------------------------------------------------------------------------

/// For `f : U_B → X` over the internal language of a finite model,
/// registers the arrow `g = i_X ∘ f` as a function symbol and returns the
/// representing term `τ_f = g(u)`, with `⊢ τ_f ∈ X` checked.
pub fn tau_f(lang: &mut InternalLanguage, f: &SFunction, u: &Var) -> Result<Term> {
    if !f.dom().is_universal_form() {
        return Err(Error::NotFromUniversal(format!("{}", f.dom().term())));
    }
    let b_ty = f.dom().elem_ty().clone();
    if u.ty != b_ty {
        return Err(Error::TypeMismatch(format!(
            "u has type {}, expected {b_ty}",
            u.ty
        )));
    }
    let a_ty = f.cod().elem_ty().clone();
    let pairs = lang.graph_pairs(f)?;
    let carrier_b = lang.interp.carrier(&b_ty)?;
    let mut table = Vec::with_capacity(carrier_b.len());
    for b in &carrier_b.values {
        let a = pairs
            .iter()
            .find(|(x, _)| x == b)
            .map(|(_, y)| y.clone())
            .ok_or_else(|| Error::NotTotal("τ_f table".into()))?;
        table.push(a);
    }
    let g_name = lang.fresh_symbol("tau");
    lang.add_arrow(&g_name, b_ty, a_ty, table)?;
    let tau = lang.sig.app(&g_name, Term::var(u.clone()))?;
    let lands = Term::mem(tau.clone(), f.cod().term().clone())?;
    if !lang.interp.th_entails(&[], &lands)? {
        return Err(Error::shape("τ_f", "representing term does not land in X"));
    }
    Ok(tau)
}

// ---------------------------------------------------------------------------
// f*: the canonical parameterization
// ---------------------------------------------------------------------------

/// `f* = ({⟨u,v⟩ : γ(x/i_X(u), y/i_Y(v))}, U_𝐗, U_𝐘)` for an S-function
/// `f : X → Y` whose graph is determined by the formula γ(x,y).
pub fn f_star(
    lang: &InternalLanguage,
    gamma: &Term,
    x: &Var,
    y: &Var,
    x_decl: &SSetDecl,
    y_decl: &SSetDecl,
) -> Result<SFunction> {
    if !gamma
        .free_vars()
        .iter()
        .all(|v| v == x || v == y)
    {
        return Err(Error::VariableClash(format!(
            "the graph formula may only have {} and {} free",
            x.name, y.name
        )));
    }
    let avoid = crate::language::all_names(&[gamma]);
    let u = fresh_var("u", x_decl.ground.clone(), &avoid);
    let v = fresh_var("v", y_decl.ground.clone(), &avoid);
    let ix_u = lang.sig.app(&x_decl.incl, Term::var(u.clone()))?;
    let iy_v = lang.sig.app(&y_decl.incl, Term::var(v.clone()))?;
    let substituted = gamma.substitute_many(
        &[(x.clone(), ix_u), (y.clone(), iy_v)],
        crate::language::SubstMode::Renaming,
    )?;
    let pair = Term::tuple(vec![Term::var(u.clone()), Term::var(v.clone())]);
    let graph = sugar::image_set(&[u, v], pair, substituted)?;
    mk_sfunction(
        &lang.interp,
        LSet::new(graph)?,
        x_decl.universe(),
        y_decl.universe(),
    )
}

// ---------------------------------------------------------------------------
// ρ: the canonical equivalence on syntactic sets
// ---------------------------------------------------------------------------

/// The outcome of `ρ`: the finite object, the computed L-set over the base
/// language, and the explicit bijection tables witnessing
/// `η(ρ𝔛) ≅ 𝔛`, plus the elementwise naturality check.
#[derive(Clone, Debug)]
pub struct RhoResult {
    pub rho_set: LSet,
    pub object: Vec<Value>,
    pub xi_extension: Vec<Value>,
    pub to_object: Vec<(Value, Value)>,
    pub from_object: Vec<(Value, Value)>,
    pub iso_verified: bool,
    pub natural_verified: bool,
}

/// Computes `ρ𝔛 = {x : (⟦γ⟧_{H,u})^♮(x)}` for an internal-language set
/// `𝔛` of type `P𝐗`, returning explicit bijection witnesses.
pub fn rho(lang: &InternalLanguage, x_decl: &SSetDecl, xi: &LSet) -> Result<RhoResult> {
    if xi.elem_ty() != &x_decl.ground {
        return Err(Error::TypeMismatch(format!(
            "𝔛 has element type {}, expected {}",
            xi.elem_ty(),
            x_decl.ground
        )));
    }
    let interp = &lang.interp;
    // γ with one free variable u of type 𝐗: the comprehension body when 𝔛
    // is one, the membership formula otherwise.
    let (u, gamma) = match xi.term().kind() {
        TermKind::Compr(v, body) => (v.clone(), body.clone()),
        _ => {
            let u = fresh_var("u", x_decl.ground.clone(), &crate::language::all_names(&[xi.term()]));
            let gamma = Term::mem(Term::var(u.clone()), xi.term().clone())?;
            (u, gamma)
        }
    };
    // ⟦γ⟧_{H,u} : U_𝐗 → Ω and the composite (⟦γ⟧ ∘ r_X⁻¹) : X → Ω.
    let omega = LSet::universal(TypeExpr::Omega);
    let k = represent(interp, &[u.clone()], gamma.clone(), &x_decl.universe(), &omega)?;
    let rx = lang.r_x(x_decl)?;
    let rx_inv = inverse(interp, &rx)?;
    let h = compose_unchecked(&k, &rx_inv)?;
    let x = fresh_var(
        "x",
        x_decl.set.elem_ty().clone(),
        &crate::language::all_names(&[h.graph().term()]),
    );
    let rho_body = natural_at(&h, Term::var(x.clone()))?;
    let rho_set = LSet::new(Term::compr(x.clone(), rho_body.clone())?)?;

    // Extensions and explicit bijections.
    let object = match interp.eval_closed(rho_set.term())? {
        Value::Set(items) => items,
        _ => unreachable!("comprehension evaluates to a set"),
    };
    let xi_extension = match interp.eval_closed(xi.term())? {
        Value::Set(items) => items,
        _ => unreachable!("L-set evaluates to a set"),
    };
    let incl_table = lang.tables.get(&x_decl.incl).cloned().unwrap_or_default();
    let carrier_x = interp.carrier(&x_decl.ground)?;
    let image_of = |c: &Value| -> Result<Value> {
        let idx = carrier_x
            .index_of(c)
            .ok_or_else(|| Error::TypeMismatch(format!("{c:?} not in carrier")))?;
        Ok(incl_table[idx].clone())
    };
    let mut to_object = Vec::new();
    for c in &xi_extension {
        to_object.push((c.clone(), image_of(c)?));
    }
    let from_object: Vec<(Value, Value)> =
        to_object.iter().map(|(a, b)| (b.clone(), a.clone())).collect();
    let mut image: Vec<Value> = to_object.iter().map(|(_, b)| b.clone()).collect();
    image.sort();
    image.dedup();
    let iso_verified = image.len() == xi_extension.len() && image == object;

    // (E:naturalcanonical), elementwise: evaluating γ at u = c agrees with
    // evaluating the ♮-formula at x = i_X(c).
    let mut natural_verified = true;
    for c in &carrier_x.values {
        let lhs = interp.eval(&gamma, &[u.clone()], &[c.clone()])?;
        let rhs = interp.eval(&rho_body, &[x.clone()], &[image_of(c)?])?;
        if lhs != rhs {
            natural_verified = false;
            break;
        }
    }
    Ok(RhoResult {
        rho_set,
        object,
        xi_extension,
        to_object,
        from_object,
        iso_verified,
        natural_verified,
    })
}
