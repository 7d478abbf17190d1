//! Batch front end: parse a workspace file, dispatch to the kernel, and
//! report verdicts.
//!
//! Exit codes: 0 all checks pass, 1 at least one verdict failed, 2 input
//! error, 3 enumeration budget exceeded.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use loset::deduction::{check_proof, Mode, Theory, Verdict};
use loset::error::Error;
use loset::finset::{Budget, FinInterpretation};
use loset::language::{Term, TypeExpr, Var};
use loset::settheory::{extensional_eq, mk_sfunction, represent, LSet, SFunction};
use loset::sugar;
use loset::syntax::print_term;
use loset::translation::{
    f_star, internal_language, preimage_translate, preimage_translate_definitional, rho, SSetDecl,
};
use loset::workspace::{self, Workspace};

#[derive(Parser)]
#[command(name = "loset", about = "Kernel for local set theories", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckMode {
    Kernel,
    Extended,
}

#[derive(clap::Subcommand)]
enum Command {
    /// Check every proof in the workspace.
    Check {
        file: PathBuf,
        /// kernel: primitive rules only (derived nodes are expanded first);
        /// extended: derived nodes are trusted after side-condition checks.
        #[arg(long, value_enum, default_value = "kernel")]
        mode: CheckMode,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the validity of every named sequent under the loaded
    /// interpretation.
    Eval {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run every translation request: print both translation forms and the
    /// verdict of their semantic equivalence.
    Translate {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Build the internal language of the loaded finite model and run the
    /// representability battery over its objects and arrows.
    Topos {
        file: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Serialize)]
struct Line {
    name: String,
    ok: bool,
    detail: String,
}

#[derive(Serialize)]
struct Report {
    command: String,
    lines: Vec<Line>,
    pass: bool,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            lines: Vec::new(),
            pass: true,
        }
    }

    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        if !ok {
            self.pass = false;
        }
        self.lines.push(Line {
            name: name.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn render(&self, json: bool) {
        if json {
            println!("{}", serde_json::to_string_pretty(self).unwrap());
        } else {
            for line in &self.lines {
                let tag = if line.ok { "PASS" } else { "FAIL" };
                println!("{tag} {} — {}", line.name, line.detail);
            }
            println!(
                "{}: {} of {} checks passed",
                self.command,
                self.lines.iter().filter(|l| l.ok).count(),
                self.lines.len()
            );
        }
    }
}

fn budget_from(flag: Option<u64>) -> Budget {
    let mut b = Budget::default();
    if let Some(rows) = flag {
        b.max_rows = rows;
    }
    b
}

fn load(file: &PathBuf) -> Result<Workspace, Error> {
    let src = std::fs::read_to_string(file)
        .map_err(|e| Error::MissingComponent(format!("cannot read {}: {e}", file.display())))?;
    workspace::parse(&src)
}

fn build_interp(ws: &Workspace, budget: Budget) -> Result<FinInterpretation, Error> {
    let spec = ws.interp.as_ref().ok_or_else(|| {
        Error::MissingComponent("this command needs an (interp ...) entry".into())
    })?;
    spec.build(&ws.signature, budget)
}

fn resolve_function(
    ws: &Workspace,
    interp: &FinInterpretation,
    name: &str,
) -> Result<SFunction, Error> {
    let entry = ws
        .function(name)
        .ok_or_else(|| Error::Resolution(format!("unknown function `{name}`")))?;
    mk_sfunction(
        interp,
        LSet::new(entry.graph.clone())?,
        LSet::new(entry.dom.clone())?,
        LSet::new(entry.cod.clone())?,
    )
}

fn run_check(ws: &Workspace, mode: CheckMode, report: &mut Report) -> Result<(), Error> {
    let theory = Theory::new(
        ws.signature.clone(),
        ws.axioms.iter().map(|(_, s)| s.clone()).collect(),
    )?;
    for (name, tree) in &ws.proofs {
        match tree {
            Err(e) => report.push(name, false, format!("does not elaborate: {e}")),
            Ok(tree) => {
                let (tree, mode) = match mode {
                    CheckMode::Extended => (tree.clone(), Mode::Extended),
                    CheckMode::Kernel => match tree.expand_derived(&ws.signature) {
                        Ok(t) => (t, Mode::Kernel),
                        Err(e) => {
                            report.push(name, false, format!("tactic expansion failed: {e}"));
                            continue;
                        }
                    },
                };
                match check_proof(&theory, &tree, mode) {
                    Verdict::Accepted(seq) => {
                        report.push(name, true, format!("accepted, concludes {seq}"))
                    }
                    Verdict::Rejected { path, reason } => {
                        report.push(name, false, format!("rejected at {path:?}: {reason}"))
                    }
                }
            }
        }
    }
    Ok(())
}

fn run_eval(ws: &Workspace, interp: &FinInterpretation, report: &mut Report) -> Result<(), Error> {
    for (name, seq) in &ws.sequents {
        let ok = interp.valid(seq)?;
        report.push(name, ok, if ok { "valid" } else { "invalid" }.to_string());
    }
    Ok(())
}

fn run_translate(
    ws: &Workspace,
    interp: &FinInterpretation,
    report: &mut Report,
) -> Result<(), Error> {
    for (name, req) in &ws.translations {
        let f = resolve_function(ws, interp, &req.function)?;
        let lemma = preimage_translate(&f, &req.theta, &req.source, &req.target)?;
        let def =
            preimage_translate_definitional(interp, &f, &req.theta, &req.source, &req.target)?;
        let equivalent = interp.th_entails(
            &[],
            &sugar::iff(lemma.formula.clone(), def.formula.clone())?,
        )?;
        report.push(
            name,
            equivalent,
            format!(
                "canonical {} | definitional {} | equivalent: {equivalent}",
                print_term(&lemma.formula),
                print_term(&def.formula)
            ),
        );
    }
    Ok(())
}

/// Declares each ground of the model as an S-set and each ground-to-ground
/// arrow as a declared arrow in the internal language, then runs the
/// representability battery.
fn run_topos(ws: &Workspace, budget: Budget, report: &mut Report) -> Result<(), Error> {
    let interp = build_interp(ws, budget)?;
    let objects: Vec<(String, usize)> = ws
        .signature
        .grounds()
        .iter()
        .map(|g| (g.clone(), interp.ground_size(g).unwrap_or(0)))
        .collect();
    let object_refs: Vec<(&str, usize)> =
        objects.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let mut arrows: Vec<(String, String, String, Vec<usize>)> = Vec::new();
    for (name, (arg, res)) in ws.signature.fns() {
        if let (TypeExpr::Ground(a), TypeExpr::Ground(b)) = (arg, res) {
            let cod = interp.carrier(res)?;
            let table = interp
                .table(name)
                .unwrap()
                .iter()
                .map(|v| cod.index_of(v).unwrap())
                .collect();
            arrows.push((name.clone(), a.clone(), b.clone(), table));
        }
    }
    let arrow_refs: Vec<(&str, &str, &str, Vec<usize>)> = arrows
        .iter()
        .map(|(n, a, b, t)| (n.as_str(), a.as_str(), b.as_str(), t.clone()))
        .collect();
    let mut lang = internal_language(&object_refs, &arrow_refs)?;
    lang.set_budget(budget)?;

    // Declare every object as the universal S-set over its type.
    let mut decls: Vec<(String, SSetDecl)> = Vec::new();
    for (obj, _) in &objects {
        let set = LSet::universal(TypeExpr::ground(obj.clone()));
        let decl = lang.declare_sset(&format!("S_{obj}"), &set)?;
        decls.push((obj.clone(), decl));
    }
    // r_X is a bijection for every declared S-set.
    for (obj, decl) in &decls {
        let rx = lang.r_x(decl)?;
        let ok = loset::settheory::is_bijection(lang.interp(), &rx)?;
        report.push(format!("r_{obj}"), ok, "r_X bijection".to_string());
    }
    // Arrow battery.
    for (name, a, b, _) in &arrows {
        let a_decl = &decls.iter().find(|(o, _)| o == a).unwrap().1;
        let b_decl = &decls.iter().find(|(o, _)| o == b).unwrap().1;
        let x = Var::new("x", TypeExpr::ground(a.clone()));
        let y = Var::new("y", TypeExpr::ground(b.clone()));
        let body = lang.signature().app(name, Term::var(x.clone()))?;
        let f = represent(
            lang.interp(),
            &[x.clone()],
            body.clone(),
            &LSet::universal(TypeExpr::ground(a.clone())),
            &LSet::universal(TypeExpr::ground(b.clone())),
        )?;
        // Declare the arrow symbol between the S-set grounds.
        let sym = format!("F_{name}");
        lang.declare_arrow(&sym, &f, a_decl, b_decl)?;
        // f* from the graph formula γ(x,y) := y = f(x).
        let gamma = Term::eq(Term::var(y.clone()), body)?;
        let fs = f_star(&lang, &gamma, &x, &y, a_decl, b_decl)?;
        let u = Var::new("u", a_decl.ground.clone());
        let rep = represent(
            lang.interp(),
            &[u.clone()],
            lang.signature().app(&sym, Term::var(u.clone()))?,
            &a_decl.universe(),
            &b_decl.universe(),
        )?;
        let ok = extensional_eq(lang.interp(), &fs, &rep)?;
        report.push(
            format!("fstar_{name}"),
            ok,
            "f* extensionally equals (u ↦ f(u))",
        );
        // The canonical-representation square: ⟨i_X(u), i_Y(f(u))⟩ ∈ |f|.
        let ix_u = lang.signature().app(&a_decl.incl, Term::var(u.clone()))?;
        let f_u = lang.signature().app(&sym, Term::var(u.clone()))?;
        let iy_fu = lang.signature().app(&b_decl.incl, f_u)?;
        let square = f.pair_in_graph(ix_u, iy_fu)?;
        let ok = lang.interp().th_entails(&[], &square)?;
        report.push(
            format!("square_{name}"),
            ok,
            "⟨i_X(u), i_Y(f(u))⟩ ∈ |f|",
        );
        // χ(m) for monic arrows.
        let table = lang.interp().table(name).cloned().unwrap_or_default();
        let injective = {
            let mut seen = table.clone();
            seen.sort();
            seen.dedup();
            seen.len() == table.len()
        };
        if injective {
            let chi = lang.chi(name)?;
            let xv = Var::new("x", TypeExpr::ground(b.clone()));
            let yv = Var::new("y", TypeExpr::ground(a.clone()));
            let lhs = lang.signature().app(&chi, Term::var(xv.clone()))?;
            let m_y = lang.signature().app(name, Term::var(yv.clone()))?;
            let rhs = sugar::exists(yv, Term::eq(Term::var(xv), m_y)?)?;
            let ok = lang.interp().th_entails(&[], &sugar::iff(lhs, rhs)?)?;
            report.push(
                format!("chi_{name}"),
                ok,
                "χ(m)(x) ⇔ ∃y. x = m(y)",
            );
        }
    }
    // A ρ spot check per object: the universal internal set comes back.
    for (obj, decl) in &decls {
        let xi = LSet::universal(decl.ground.clone());
        let out = rho(&lang, decl, &xi)?;
        report.push(
            format!("rho_{obj}"),
            out.iso_verified && out.natural_verified,
            "ρ(U) isomorphic to U with naturality",
        );
    }
    let _ = ws;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(Report, bool), Error> {
    match cli.command {
        Command::Check {
            file,
            mode,
            budget: _,
            threads,
            json,
        } => {
            if let Some(n) = threads {
                loset::finset::set_threads(n);
            }
            let ws = load(&file)?;
            let mut report = Report::new("check");
            run_check(&ws, mode, &mut report)?;
            Ok((report, json))
        }
        Command::Eval {
            file,
            budget,
            threads,
            json,
        } => {
            if let Some(n) = threads {
                loset::finset::set_threads(n);
            }
            let ws = load(&file)?;
            let interp = build_interp(&ws, budget_from(budget))?;
            let mut report = Report::new("eval");
            run_eval(&ws, &interp, &mut report)?;
            Ok((report, json))
        }
        Command::Translate {
            file,
            budget,
            threads,
            json,
        } => {
            if let Some(n) = threads {
                loset::finset::set_threads(n);
            }
            let ws = load(&file)?;
            let interp = build_interp(&ws, budget_from(budget))?;
            let mut report = Report::new("translate");
            run_translate(&ws, &interp, &mut report)?;
            Ok((report, json))
        }
        Command::Topos {
            file,
            budget,
            threads,
            json,
        } => {
            if let Some(n) = threads {
                loset::finset::set_threads(n);
            }
            let ws = load(&file)?;
            let mut report = Report::new("topos");
            run_topos(&ws, budget_from(budget), &mut report)?;
            Ok((report, json))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok((report, json)) => {
            let pass = report.pass;
            report.render(json);
            if pass {
                ExitCode::from(0)
            } else {
                ExitCode::from(1)
            }
        }
        Err(Error::BudgetExceeded(msg)) => {
            eprintln!("budget exceeded: {msg}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
