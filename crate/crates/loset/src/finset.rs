//! Interpretation of a local language in the topos of finite sets:
//! carriers for every type, term evaluation per the interpretation clauses,
//! sequent validity, the subobject toolkit, and decidable derivability
//! `th_entails` for the theory of the topos.
//!
//! FinSet is Boolean, so validity here is a sound but intuitionistically
//! incomplete oracle for derivability in general local set theories; all
//! soundness tests use the direction derivable => valid only.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::deduction::Sequent;
use crate::error::{Error, Result};
use crate::language::{Signature, Term, TermKind, TypeExpr, Var};

/// Opt-in evaluation parallelism (fan-out over environments).
static THREADS: AtomicUsize = AtomicUsize::new(1);

pub fn set_threads(n: usize) {
    THREADS.store(n.max(1), AtomicOrdering::Relaxed);
}

// ---------------------------------------------------------------------------
// Semantic values
// ---------------------------------------------------------------------------

/// An element of a finite carrier. Sets are kept sorted and deduplicated so
/// structural equality is extensional equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Atom(u32, u32),
    Tuple(Vec<Value>),
    Set(Vec<Value>),
}

impl Value {
    pub fn truth(&self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(*b),
            other => Err(Error::TypeMismatch(format!(
                "expected a truth value, got {other:?}"
            ))),
        }
    }

    pub fn set_contains(&self, v: &Value) -> Result<bool> {
        match self {
            Value::Set(items) => Ok(items.binary_search(v).is_ok()),
            other => Err(Error::TypeMismatch(format!(
                "expected a set value, got {other:?}"
            ))),
        }
    }
}

/// Enumeration caps; defaults keep power depth <= 2 over grounds of size
/// <= 3 comfortably inside the budget.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_rows: u64,
    pub max_carrier: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_rows: 1_000_000,
            max_carrier: 1 << 16,
        }
    }
}

#[derive(Debug)]
pub struct CarrierData {
    pub values: Vec<Value>,
    index: HashMap<Value, usize>,
}

impl CarrierData {
    fn new(values: Vec<Value>) -> Arc<CarrierData> {
        let index = values
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Arc::new(CarrierData { values, index })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index_of(&self, v: &Value) -> Option<usize> {
        self.index.get(v).copied()
    }
}

// ---------------------------------------------------------------------------
// Interpretations
// ---------------------------------------------------------------------------

/// Assignment of finite carriers to ground types and total function tables
/// to function symbols. Immutable after load; carriers are derived on
/// demand and cached.
pub struct FinInterpretation {
    sig: Signature,
    ground_sizes: BTreeMap<String, usize>,
    /// `tables[f][i]` is the output on the i-th element of the argument
    /// carrier.
    tables: BTreeMap<String, Vec<Value>>,
    budget: Budget,
    carrier_cache: Mutex<HashMap<TypeExpr, Arc<CarrierData>>>,
}

impl FinInterpretation {
    pub fn new(
        sig: Signature,
        ground_sizes: BTreeMap<String, usize>,
        tables: BTreeMap<String, Vec<Value>>,
    ) -> Result<Self> {
        Self::with_budget(sig, ground_sizes, tables, Budget::default())
    }

    pub fn with_budget(
        sig: Signature,
        ground_sizes: BTreeMap<String, usize>,
        tables: BTreeMap<String, Vec<Value>>,
        budget: Budget,
    ) -> Result<Self> {
        for g in sig.grounds() {
            let size = ground_sizes.get(g).copied().ok_or_else(|| {
                Error::MissingComponent(format!("no carrier size for ground type `{g}`"))
            })?;
            if sig.nullstellensatz() && size == 0 {
                return Err(Error::IllTypedTable {
                    symbol: g.clone(),
                    detail: "Nullstellensatz demands a constant, which forces a nonempty carrier"
                        .into(),
                });
            }
        }
        let interp = FinInterpretation {
            sig,
            ground_sizes,
            tables,
            budget,
            carrier_cache: Mutex::new(HashMap::new()),
        };
        // Totality and typing of every declared table.
        for (name, (arg_ty, res_ty)) in interp.sig.fns() {
            let table = interp.tables.get(name).ok_or_else(|| {
                Error::MissingComponent(format!("no table for function symbol `{name}`"))
            })?;
            let dom = interp.carrier(arg_ty)?;
            let cod = interp.carrier(res_ty)?;
            if table.len() != dom.len() {
                return Err(Error::IllTypedTable {
                    symbol: name.clone(),
                    detail: format!(
                        "table has {} entries but the domain carrier has {}",
                        table.len(),
                        dom.len()
                    ),
                });
            }
            for v in table {
                if cod.index_of(v).is_none() {
                    return Err(Error::IllTypedTable {
                        symbol: name.clone(),
                        detail: format!("output {v:?} is not in the codomain carrier"),
                    });
                }
            }
        }
        Ok(interp)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    pub fn set_budget(&mut self, budget: Budget) {
        self.budget = budget;
    }

    pub fn ground_size(&self, name: &str) -> Option<usize> {
        self.ground_sizes.get(name).copied()
    }

    pub fn table(&self, name: &str) -> Option<&Vec<Value>> {
        self.tables.get(name)
    }

    /// The deterministic ordered carrier of a type: grounds by index,
    /// products lexicographic with the leftmost factor most significant,
    /// powers by subset bitmask.
    pub fn carrier(&self, ty: &TypeExpr) -> Result<Arc<CarrierData>> {
        if let Some(hit) = self.carrier_cache.lock().unwrap().get(ty) {
            return Ok(hit.clone());
        }
        let values: Vec<Value> = match ty {
            TypeExpr::One => vec![Value::Unit],
            TypeExpr::Omega => vec![Value::Bool(false), Value::Bool(true)],
            TypeExpr::Ground(g) => {
                let gi = self
                    .sig
                    .ground_index(g)
                    .ok_or_else(|| Error::UnknownGround(g.clone()))? as u32;
                let n = self
                    .ground_sizes
                    .get(g)
                    .copied()
                    .ok_or_else(|| Error::UnknownGround(g.clone()))?;
                (0..n as u32).map(|i| Value::Atom(gi, i)).collect()
            }
            TypeExpr::Product(fs) => {
                let carriers = fs
                    .iter()
                    .map(|f| self.carrier(f))
                    .collect::<Result<Vec<_>>>()?;
                let mut total: u64 = 1;
                for c in &carriers {
                    total = total.saturating_mul(c.len() as u64);
                }
                if total as usize > self.budget.max_carrier {
                    return Err(Error::BudgetExceeded(format!(
                        "product carrier for {ty} has {total} elements"
                    )));
                }
                let mut out = vec![Vec::new()];
                for c in &carriers {
                    let mut next = Vec::with_capacity(out.len() * c.len());
                    for prefix in &out {
                        for v in &c.values {
                            let mut row: Vec<Value> = prefix.clone();
                            row.push(v.clone());
                            next.push(row);
                        }
                    }
                    out = next;
                }
                out.into_iter().map(Value::Tuple).collect()
            }
            TypeExpr::Power(inner) => {
                let base = self.carrier(inner)?;
                let n = base.len();
                if n >= 64 || (1u64 << n) as usize > self.budget.max_carrier {
                    return Err(Error::BudgetExceeded(format!(
                        "power carrier for {ty} has 2^{n} elements"
                    )));
                }
                (0..(1u64 << n))
                    .map(|mask| {
                        let mut items: Vec<Value> = (0..n)
                            .filter(|i| mask & (1 << i) != 0)
                            .map(|i| base.values[i].clone())
                            .collect();
                        items.sort();
                        Value::Set(items)
                    })
                    .collect()
            }
        };
        if values.len() > self.budget.max_carrier {
            return Err(Error::BudgetExceeded(format!(
                "carrier for {ty} has {} elements",
                values.len()
            )));
        }
        let data = CarrierData::new(values);
        self.carrier_cache
            .lock()
            .unwrap()
            .insert(ty.clone(), data.clone());
        Ok(data)
    }

    /// Evaluates a closed term.
    pub fn eval_closed(&self, t: &Term) -> Result<Value> {
        Evaluator::new(self).eval(t, &mut Vec::new(), &mut Vec::new())
    }

    /// Evaluates `t` under `env` for `vars` (which must cover the free
    /// variables of `t`).
    pub fn eval(&self, t: &Term, vars: &[Var], env: &[Value]) -> Result<Value> {
        let mut vs = vars.to_vec();
        let mut es = env.to_vec();
        Evaluator::new(self).eval(t, &mut vs, &mut es)
    }

    /// Sequent validity: for every environment over the free variables of
    /// the sequent, if every context formula is true then so is the
    /// conclusion.
    pub fn valid(&self, seq: &Sequent) -> Result<bool> {
        let mut vars: Vec<Var> = Vec::new();
        for f in seq.context() {
            for v in f.free_vars() {
                if !vars.contains(v) {
                    vars.push(v.clone());
                }
            }
        }
        for v in seq.conclusion().free_vars() {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        vars.sort();
        let carriers = vars
            .iter()
            .map(|v| self.carrier(&v.ty))
            .collect::<Result<Vec<_>>>()?;
        let mut rows: u64 = 1;
        for c in &carriers {
            rows = rows.saturating_mul(c.len() as u64);
        }
        if rows > self.budget.max_rows {
            return Err(Error::BudgetExceeded(format!(
                "sequent validity needs {rows} environment rows"
            )));
        }
        if rows == 0 {
            // Some carrier is empty: every sequent over it is valid.
            return Ok(true);
        }
        let threads = THREADS.load(AtomicOrdering::Relaxed);
        if threads > 1 && rows >= 1024 {
            self.valid_par(seq, &vars, &carriers, rows, threads)
        } else {
            let mut ev = Evaluator::new(self);
            let mut env = vec![Value::Unit; vars.len()];
            for row in 0..rows {
                fill_env(&mut env, row, &carriers);
                if !ev.holds_row(seq, &vars, &env)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }

    fn valid_par(
        &self,
        seq: &Sequent,
        vars: &[Var],
        carriers: &[Arc<CarrierData>],
        rows: u64,
        threads: usize,
    ) -> Result<bool> {
        let chunk = rows.div_ceil(threads as u64 * 8).max(1);
        let starts: Vec<u64> = (0..rows).step_by(chunk as usize).collect();
        starts
            .into_par_iter()
            .map(|start| {
                let mut ev = Evaluator::new(self);
                let mut env = vec![Value::Unit; vars.len()];
                let end = (start + chunk).min(rows);
                for row in start..end {
                    fill_env(&mut env, row, carriers);
                    if !ev.holds_row(seq, vars, &env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            })
            .try_reduce(|| true, |a, b| Ok(a && b))
    }

    /// Decidable derivability in the theory of the finite topos: by the
    /// defining property of Th(E), exactly sequent validity.
    pub fn th_entails(&self, hyps: &[Term], concl: &Term) -> Result<bool> {
        self.valid(&Sequent::new(hyps.to_vec(), concl.clone())?)
    }
}

fn fill_env(env: &mut [Value], row: u64, carriers: &[Arc<CarrierData>]) {
    let mut rest = row;
    for (i, c) in carriers.iter().enumerate().rev() {
        let n = c.len() as u64;
        let digit = (rest % n) as usize;
        rest /= n;
        env[i] = c.values[digit].clone();
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Term evaluator with a cache for closed subterms (graphs and other
/// L-sets are closed comprehensions, and re-enumerating them per
/// environment row would dominate everything else).
pub struct Evaluator<'a> {
    interp: &'a FinInterpretation,
    // Keyed by node address; the anchored Term keeps the allocation alive
    // so addresses cannot be reused while cached.
    closed: HashMap<usize, (Term, Value)>,
}

impl<'a> Evaluator<'a> {
    pub fn new(interp: &'a FinInterpretation) -> Self {
        Evaluator {
            interp,
            closed: HashMap::new(),
        }
    }

    fn holds_row(&mut self, seq: &Sequent, vars: &[Var], env: &[Value]) -> Result<bool> {
        let mut vs = vars.to_vec();
        let mut es = env.to_vec();
        for hyp in seq.context() {
            if !self.eval(hyp, &mut vs, &mut es)?.truth()? {
                return Ok(true);
            }
        }
        self.eval(seq.conclusion(), &mut vs, &mut es)?.truth()
    }

    pub fn eval(&mut self, t: &Term, vars: &mut Vec<Var>, env: &mut Vec<Value>) -> Result<Value> {
        let cacheable = t.is_closed() && !matches!(t.kind(), TermKind::Star);
        if cacheable {
            if let Some((_, v)) = self.closed.get(&t.node_id()) {
                return Ok(v.clone());
            }
        }
        let value = match t.kind() {
            TermKind::Star => Value::Unit,
            TermKind::Var(v) => {
                // Innermost binding wins.
                let pos = vars
                    .iter()
                    .rposition(|u| u == v)
                    .ok_or_else(|| Error::Resolution(format!("unbound variable `{}`", v.name)))?;
                env[pos].clone()
            }
            TermKind::App(f, arg) => {
                let (arg_ty, _) = self.interp.sig.fn_sig(f)?;
                let arg_ty = arg_ty.clone();
                let av = self.eval(arg, vars, env)?;
                let dom = self.interp.carrier(&arg_ty)?;
                let idx = dom.index_of(&av).ok_or_else(|| {
                    Error::TypeMismatch(format!("argument {av:?} not in carrier of {arg_ty}"))
                })?;
                self.interp.tables[f][idx].clone()
            }
            TermKind::Tuple(items) => {
                let vs = items
                    .iter()
                    .map(|i| self.eval(i, vars, env))
                    .collect::<Result<Vec<_>>>()?;
                Value::Tuple(vs)
            }
            TermKind::Proj(i, inner) => match self.eval(inner, vars, env)? {
                Value::Tuple(vs) => vs[i - 1].clone(),
                other => {
                    return Err(Error::TypeMismatch(format!(
                        "projection applied to non-tuple {other:?}"
                    )))
                }
            },
            TermKind::Compr(v, body) => {
                let c = self.interp.carrier(&v.ty)?;
                let mut items = Vec::new();
                vars.push(v.clone());
                for elem in &c.values {
                    env.push(elem.clone());
                    let holds = self.eval(body, vars, env)?.truth()?;
                    env.pop();
                    if holds {
                        items.push(elem.clone());
                    }
                }
                vars.pop();
                items.sort();
                Value::Set(items)
            }
            TermKind::Eq(a, b) => {
                let va = self.eval(a, vars, env)?;
                let vb = self.eval(b, vars, env)?;
                Value::Bool(va == vb)
            }
            TermKind::Mem(a, b) => {
                let va = self.eval(a, vars, env)?;
                let vb = self.eval(b, vars, env)?;
                Value::Bool(vb.set_contains(&va)?)
            }
        };
        if cacheable {
            self.closed
                .insert(t.node_id(), (t.clone(), value.clone()));
        }
        Ok(value)
    }
}

// ---------------------------------------------------------------------------
// Subobject toolkit
// ---------------------------------------------------------------------------

/// A concrete arrow of the finite topos: an ordered domain, ordered
/// codomain, and a total table sending the i-th domain element to
/// `table[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinArrow {
    pub dom: Vec<Value>,
    pub cod: Vec<Value>,
    pub table: Vec<Value>,
}

pub fn omega_values() -> Vec<Value> {
    vec![Value::Bool(false), Value::Bool(true)]
}

impl FinArrow {
    pub fn new(dom: Vec<Value>, cod: Vec<Value>, table: Vec<Value>) -> Result<Self> {
        if table.len() != dom.len() {
            return Err(Error::TypeMismatch(format!(
                "table has {} entries for a domain of {}",
                table.len(),
                dom.len()
            )));
        }
        for v in &table {
            if !cod.contains(v) {
                return Err(Error::TypeMismatch(format!(
                    "table output {v:?} is not in the codomain"
                )));
            }
        }
        Ok(FinArrow { dom, cod, table })
    }

    pub fn identity(carrier: Vec<Value>) -> Self {
        FinArrow {
            dom: carrier.clone(),
            cod: carrier.clone(),
            table: carrier,
        }
    }

    pub fn apply(&self, v: &Value) -> Result<&Value> {
        let i = self
            .dom
            .iter()
            .position(|d| d == v)
            .ok_or_else(|| Error::TypeMismatch(format!("{v:?} is not in the domain")))?;
        Ok(&self.table[i])
    }

    /// Composition `self ∘ other`; composability is carrier equality.
    pub fn compose(&self, other: &FinArrow) -> Result<FinArrow> {
        if other.cod != self.dom {
            return Err(Error::TypeMismatch(
                "composition requires cod(first) = dom(second)".into(),
            ));
        }
        let table = other
            .table
            .iter()
            .map(|v| self.apply(v).cloned())
            .collect::<Result<Vec<_>>>()?;
        FinArrow::new(other.dom.clone(), self.cod.clone(), table)
    }

    pub fn is_monic(&self) -> bool {
        let mut seen = Vec::new();
        for v in &self.table {
            if seen.contains(&v) {
                return false;
            }
            seen.push(v);
        }
        true
    }

    pub fn is_epic(&self) -> bool {
        self.cod.iter().all(|c| self.table.contains(c))
    }

    pub fn to_omega(&self) -> bool {
        self.cod == omega_values()
    }

    /// True-set of an arrow into Omega, in domain order.
    pub fn true_set(&self) -> Result<Vec<Value>> {
        if !self.to_omega() {
            return Err(Error::TypeMismatch("not an arrow into Omega".into()));
        }
        Ok(self
            .dom
            .iter()
            .zip(&self.table)
            .filter(|(_, t)| **t == Value::Bool(true))
            .map(|(d, _)| d.clone())
            .collect())
    }
}

/// The characteristic arrow of a monic: true exactly on the image.
pub fn char_of(mono: &FinArrow) -> Result<FinArrow> {
    if !mono.is_monic() {
        return Err(Error::NotMonic(format!(
            "table {:?} is not injective",
            mono.table
        )));
    }
    let table = mono
        .cod
        .iter()
        .map(|c| Value::Bool(mono.table.contains(c)))
        .collect();
    FinArrow::new(mono.cod.clone(), omega_values(), table)
}

/// The subobject classified by an arrow into Omega: the inclusion of its
/// true-set.
pub fn bar(u: &FinArrow) -> Result<FinArrow> {
    let dom = u.true_set()?;
    FinArrow::new(dom.clone(), u.dom.clone(), dom)
}

/// The maximal characteristic arrow `T_A = χ(1_A)`: constantly true.
pub fn top(carrier: Vec<Value>) -> FinArrow {
    let table = vec![Value::Bool(true); carrier.len()];
    FinArrow {
        dom: carrier,
        cod: omega_values(),
        table,
    }
}

/// The transferred subobject order: `u ≤ v` iff the true-set of `u` is
/// contained in the true-set of `v`.
pub fn leq(u: &FinArrow, v: &FinArrow) -> Result<bool> {
    if u.dom != v.dom {
        return Err(Error::TypeMismatch(
            "subobject order compares arrows with the same domain".into(),
        ));
    }
    let us = u.true_set()?;
    let vs = v.true_set()?;
    Ok(us.iter().all(|x| vs.contains(x)))
}
