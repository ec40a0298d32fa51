//! End-to-end tests of the `stepix` binary: exit codes, stream discipline
//! (results on stdout, diagnostics on stderr), and output determinism.

use std::process::{Command, Output};

fn stepix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stepix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8")
}

#[test]
fn eval_value_exits_zero() {
    let out = stepix(&["eval", "(\\x. x) 0", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "(\\x. x) 0\n0\nvalue: 0\n");
    assert!(stderr(&out).is_empty());
}

#[test]
fn eval_stuck_exits_two() {
    let out = stepix(&["eval", "0 0", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out), "0 0\nstuck: 0 0\n");
}

#[test]
fn eval_budget_exits_zero() {
    let out = stepix(&["eval", "fix \\x. x", "--steps", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("budget: (\\x. x) (fix \\x. x)\n"));
}

#[test]
fn eval_parse_error_exits_64() {
    let out = stepix(&["eval", "(\\x. x", "--steps", "10"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stdout(&out).is_empty(), "diagnostics must not go to stdout");
    assert!(stderr(&out).contains("error"));
}

#[test]
fn eval_open_term_exits_64() {
    let out = stepix(&["eval", "x y"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("unbound variable"));
}

#[test]
fn safe_command() {
    let out = stepix(&["safe", "(\\x. x x) (\\x. x x)", "--k", "500"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("safe for 500 steps: yes"));

    let out = stepix(&["safe", "0 0", "--k", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("safe for 1 steps: no"));
}

#[test]
fn check_holds_exits_zero() {
    let out = stepix(&["check", "0", "--k", "5", "--type", "Nat"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "verdict: holds\n");
}

#[test]
fn check_refuted_exits_one_with_witness() {
    let out = stepix(&["check", "0 0", "--k", "1", "--type", "Nat"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("verdict: refuted\nwitness:\n"));
    assert!(text.contains("stuck: 0 0"));
}

#[test]
fn check_passed_probes_exits_zero() {
    let out = stepix(&["check", "\\x. x", "--k", "3", "--type", "Nat -> Nat"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict: passed\nprobes: "));
}

#[test]
fn check_type_parse_error_exits_64() {
    let out = stepix(&["check", "0", "--k", "3", "--type", "Nat ->"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn derive_prints_type_and_tree() {
    let out = stepix(&["derive", "\\x:Nat. x"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("type: Nat -> Nat\n"));
    assert!(text.contains("Abs: {} |- \\x. x : Nat -> Nat"));

    let out = stepix(&["derive", "fix \\x:Nat. x"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("type: Nat\n"));
}

#[test]
fn derive_failure_exits_one() {
    let out = stepix(&["derive", "0 1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    assert!(stderr(&out).contains("expected an arrow type"));
}

#[test]
fn derive_with_env() {
    let out = stepix(&["derive", "f 0", "--env", "f: mu X. Nat -> X"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("type: mu X. Nat -> X\n"));
    assert!(stdout(&out).contains("MuUnfold"));
}

#[test]
fn verify_single_suite_passes() {
    let out = stepix(&["verify", "--suite", "determinism", "--cases", "500", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("property: determinism"));
    assert!(text.contains("cases: 500"));
    assert!(text.contains("refutations: 0"));
}

#[test]
fn verify_unknown_suite_exits_64() {
    let out = stepix(&["verify", "--suite", "no-such-thing"]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains("unknown property"));
}

#[test]
fn verify_is_byte_deterministic() {
    let run = || stepix(&["verify", "--suite", "all", "--cases", "25", "--seed", "42"]);
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // all eleven properties appear, in catalog order
    let text = stdout(&a);
    let names: Vec<&str> = text
        .lines()
        .filter_map(|l| l.strip_prefix("property: "))
        .collect();
    assert_eq!(
        names,
        vec![
            "determinism",
            "index0-vacuity",
            "downward-closure",
            "safety-theorem",
            "application-lemma",
            "abstraction-theorem",
            "fix-lemma",
            "mu-fixpoint",
            "mu-floor",
            "floor-defs",
            "wf-equation",
        ]
    );
}

#[test]
fn file_indirection() {
    let dir = std::env::temp_dir().join(format!("stepix-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("term.lam");
    std::fs::write(&path, "-- a redex\n(\\x. x) 3\n").unwrap();
    let arg = format!("@{}", path.display());
    let out = stepix(&["eval", &arg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("value: 3\n"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn structured_format_echoes_inputs() {
    let out = stepix(&["check", "0", "--k", "2", "--type", "Nat", "--format", "structured"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("command: check"));
    assert!(text.contains("term: 0"));
    assert!(text.contains("k: 2"));
    assert!(text.contains("verdict: holds"));

    let out = stepix(&["eval", "0", "--format", "structured"]);
    let text = stdout(&out);
    assert!(text.contains("command: eval"));
    assert!(text.contains("terminal: value"));
}

#[test]
fn usage_error_exits_64() {
    let out = stepix(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}
