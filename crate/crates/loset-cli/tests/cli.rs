//! End-to-end tests of the `loset` binary: subcommand behavior, exit
//! codes, determinism of reports, and parse/print round trips over the
//! fixture corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_loset")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn check_accepts_basic_workspace() {
    let out = run(&["check", data("basic.lst").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("PASS unity-subst"));
    assert!(text.contains("PASS derived-exists"));
}

#[test]
fn check_kernel_vs_extended_modes() {
    for mode in ["kernel", "extended"] {
        let out = run(&[
            "check",
            data("basic.lst").to_str().unwrap(),
            "--mode",
            mode,
        ]);
        assert_eq!(out.status.code(), Some(0), "mode {mode}: {}", stdout_of(&out));
    }
}

#[test]
fn eval_reports_validity_and_exit_zero() {
    let out = run(&["eval", data("basic.lst").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("PASS refl"));
    assert!(text.contains("PASS excluded-middle"));
    assert!(text.contains("PASS modus"));
}

#[test]
fn eval_rejects_invalid_sequents_with_exit_one() {
    let out = run(&["eval", data("rejects.lst").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout_of(&out));
    assert!(stdout_of(&out).contains("FAIL absurd"));
}

#[test]
fn check_rejects_bad_cut_with_exit_one() {
    let out = run(&["check", data("rejects.lst").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("FAIL bad-cut"));
    assert!(text.contains("PASS good"));
}

#[test]
fn translate_verdicts_are_equivalences() {
    let out = run(&["translate", data("basic.lst").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("PASS const-b"));
    assert!(text.contains("equivalent: true"));
}

#[test]
fn topos_battery_passes_on_two_object_model() {
    let out = run(&["topos", data("model2.lst").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout_of(&out));
    let text = stdout_of(&out);
    // One f* verdict per arrow.
    assert!(text.contains("PASS fstar_swap"));
    assert!(text.contains("PASS fstar_into"));
    assert!(text.contains("PASS fstar_squash"));
    // Monics get the χ(m) check: swap and into are injective, squash is not.
    assert!(text.contains("PASS chi_swap"));
    assert!(text.contains("PASS chi_into"));
    assert!(!text.contains("chi_squash"));
    assert!(text.contains("PASS rho_X"));
}

#[test]
fn missing_component_is_an_input_error() {
    // basic eval without an interp entry.
    let tmp = std::env::temp_dir().join("loset-no-interp.lst");
    std::fs::write(&tmp, "(sig (ground A))\n(sequent s () true)\n").unwrap();
    let out = run(&["eval", tmp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn syntax_error_is_an_input_error() {
    let tmp = std::env::temp_dir().join("loset-syntax-err.lst");
    std::fs::write(&tmp, "(sig (ground A)").unwrap();
    let out = run(&["eval", tmp.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_is_exit_three() {
    let out = run(&[
        "eval",
        data("basic.lst").to_str().unwrap(),
        "--budget",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout_of(&out));
}

#[test]
fn reports_are_deterministic() {
    for cmd in ["check", "eval", "translate", "topos"] {
        let a = stdout_of(&run(&[cmd, data("basic.lst").to_str().unwrap()]));
        let b = stdout_of(&run(&[cmd, data("basic.lst").to_str().unwrap()]));
        assert_eq!(a, b, "{cmd} output must be byte-identical across runs");
    }
}

#[test]
fn threads_do_not_change_reports() {
    let a = stdout_of(&run(&["eval", data("basic.lst").to_str().unwrap()]));
    let b = stdout_of(&run(&[
        "eval",
        data("basic.lst").to_str().unwrap(),
        "--threads",
        "4",
    ]));
    assert_eq!(a, b);
}

#[test]
fn json_reports_mirror_text_reports() {
    let out = run(&["eval", data("basic.lst").to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(value["command"], "eval");
    assert_eq!(value["pass"], true);
    assert!(value["lines"].as_array().unwrap().len() >= 4);
}

#[test]
fn fixture_corpus_round_trips() {
    // parse -> print -> parse -> print: the two prints must agree, and the
    // reparse must succeed on every fixture.
    for entry in std::fs::read_dir(data("")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("lst") {
            continue;
        }
        let src = std::fs::read_to_string(&path).unwrap();
        let ws = loset::workspace::parse(&src)
            .unwrap_or_else(|e| panic!("{} fails to parse: {e}", path.display()));
        let printed = loset::workspace::print(&ws);
        let ws2 = loset::workspace::parse(&printed)
            .unwrap_or_else(|e| panic!("{} canonical form fails to reparse: {e}", path.display()));
        let printed2 = loset::workspace::print(&ws2);
        assert_eq!(
            printed,
            printed2,
            "{}: print ∘ parse ∘ print differs from print",
            path.display()
        );
    }
}
