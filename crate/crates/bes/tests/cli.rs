//! End-to-end checks of the command-line surface: exit codes, text
//! verdicts, JSON payload shapes, and error routing.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bes")).args(args).output().expect("the binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("stderr is UTF-8")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("the process exits normally")
}

fn json(output: &Output) -> Value {
    serde_json::from_str(&stdout(output)).expect("stdout is a JSON document")
}

/// Writes the three-rule base that makes `r` interderivable with `a, b`.
fn conjunction_base(dir: &tempfile::TempDir) -> PathBuf {
    let path = dir.path().join("conj.base");
    std::fs::write(&path, "a, b => r\nr => a\nr => b\n").expect("base file writes");
    path
}

#[test]
fn check_prints_a_verdict_and_exit_code() {
    let valid = run(&["check", "p -> p"]);
    assert_eq!(stdout(&valid), "valid\n");
    assert_eq!(code(&valid), 0);

    let invalid = run(&["check", "p \\/ ~p"]);
    assert_eq!(stdout(&invalid), "invalid\n");
    assert_eq!(code(&invalid), 1);
}

#[test]
fn check_json_carries_formula_and_verdict() {
    let output = run(&["check", "p /\\ q -> p", "--json"]);
    assert_eq!(code(&output), 0);
    let payload = json(&output);
    assert_eq!(payload["formula"], "p /\\ q -> p");
    assert_eq!(payload["valid"], true);
}

#[test]
fn parse_errors_exit_two_without_a_verdict() {
    let output = run(&["check", "p ->"]);
    assert_eq!(code(&output), 2);
    assert_eq!(stdout(&output), "");
    assert!(stderr(&output).starts_with("error:"), "stderr: {}", stderr(&output));

    let json_variant = run(&["check", "p ->", "--json"]);
    assert_eq!(code(&json_variant), 2);
    assert_eq!(stdout(&json_variant), "");
}

#[test]
fn missing_base_files_exit_two() {
    let output = run(&["derive", "--base", "/definitely/not/here.base", "r"]);
    assert_eq!(code(&output), 2);
    assert!(stderr(&output).starts_with("error:"));
}

#[test]
fn derive_follows_the_base_rules() {
    let dir = tempfile::tempdir().expect("a temporary directory is available");
    let base = conjunction_base(&dir);
    let base = base.to_str().expect("temp path is UTF-8");

    let derivable = run(&["derive", "--base", base, "--assume", "a,b", "r"]);
    assert_eq!(stdout(&derivable), "derivable\n");
    assert_eq!(code(&derivable), 0);

    let underivable = run(&["derive", "--base", base, "--assume", "a", "r"]);
    assert_eq!(stdout(&underivable), "underivable\n");
    assert_eq!(code(&underivable), 1);
}

#[test]
fn derive_trace_replays_the_rule_steps() {
    let dir = tempfile::tempdir().expect("a temporary directory is available");
    let base = conjunction_base(&dir);
    let base = base.to_str().expect("temp path is UTF-8");

    let output = run(&["derive", "--base", base, "--assume", "a,b", "r", "--trace"]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.starts_with("derivable\n"));
    assert!(text.len() > "derivable\n".len(), "trace output missing: {text}");

    let payload = json(&run(&["derive", "--base", base, "--assume", "a,b", "r", "--trace", "--json"]));
    assert_eq!(payload["derivable"], true);
    assert_eq!(payload["goal"], "r");
    assert!(payload["trace"].is_object(), "trace missing from JSON payload");
}

#[test]
fn support_decides_under_context_and_base() {
    let dir = tempfile::tempdir().expect("a temporary directory is available");
    let base = conjunction_base(&dir);
    let base = base.to_str().expect("temp path is UTF-8");

    let supported = run(&["support", "--base", base, "--context", "a; b", "r"]);
    assert_eq!(stdout(&supported), "supported\n");
    assert_eq!(code(&supported), 0);

    let compound = run(&["support", "--base", base, "r -> a /\\ b"]);
    assert_eq!(stdout(&compound), "supported\n");
    assert_eq!(code(&compound), 0);

    let unsupported = run(&["support", "--base", base, "p \\/ ~p"]);
    assert_eq!(stdout(&unsupported), "unsupported\n");
    assert_eq!(code(&unsupported), 1);
}

#[test]
fn support_json_lists_goal_and_universe() {
    let dir = tempfile::tempdir().expect("a temporary directory is available");
    let base = conjunction_base(&dir);
    let base = base.to_str().expect("temp path is UTF-8");

    let payload = json(&run(&["support", "--base", base, "--context", "a; b", "r", "--json"]));
    assert_eq!(payload["verdict"], true);
    assert_eq!(payload["goal"], "r");
    assert_eq!(payload["context"].as_array().expect("context is a list").len(), 2);
    assert!(!payload["universe"].as_array().expect("universe is a list").is_empty());
}

#[test]
fn flatten_prints_the_naming_table() {
    let output = run(&["flatten", "(p -> q) \\/ bot"]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(text.contains("normalized:"), "missing normalization line: {text}");
    assert!(text.contains(":="), "missing naming entries: {text}");
    assert!(text.contains("absurdity atom:"), "missing absurdity atom: {text}");

    let payload = json(&run(&["flatten", "(p -> q) \\/ bot", "--json"]));
    assert!(payload["entries"].as_array().expect("entries are a list").len() >= 3);
    assert!(payload["absurdity_atom"].is_string());
    assert!(payload["reserved_atom"].is_string());
}

#[test]
fn emit_clauses_covers_both_systems() {
    let plain = run(&["emit-clauses", "(p -> q) \\/ r", "--system", "mints"]);
    assert_eq!(code(&plain), 0);
    assert!(stdout(&plain).contains("goal:"));

    let open = run(&["emit-clauses", "(p -> q) \\/ r", "--system", "n"]);
    assert_eq!(code(&open), 0);

    let instantiated =
        run(&["emit-clauses", "(p -> q) \\/ r", "--system", "n", "--universe", "a,b,c"]);
    assert_eq!(code(&instantiated), 0);

    let conflict =
        run(&["emit-clauses", "(p -> q) \\/ r", "--system", "mints", "--universe", "a,b"]);
    assert_eq!(code(&conflict), 2);
    assert!(stderr(&conflict).starts_with("error:"));
}

#[test]
fn crosscheck_summarizes_and_exits_clean() {
    let output = run(&["crosscheck", "--random", "10", "--seed", "3", "--max-size", "5", "--atoms", "2"]);
    assert_eq!(code(&output), 0);
    let text = stdout(&output);
    assert!(
        text.contains("checked 19 formulas, 0 mismatches"),
        "unexpected summary: {text}"
    );

    let payload = run(&["crosscheck", "--random", "10", "--seed", "3", "--max-size", "5",
        "--atoms", "2", "--json"]);
    assert_eq!(code(&payload), 0);
    let body = stdout(&payload);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines.len(), 20, "19 records plus a summary line");
    let summary: Value = serde_json::from_str(lines[19]).expect("summary line is JSON");
    assert_eq!(summary["total"], 19);
    assert_eq!(summary["mismatches"], 0);
    let record: Value = serde_json::from_str(lines[0]).expect("record lines are JSON");
    assert_eq!(record["agree"], true);
}

#[test]
fn refute_prints_models_or_none() {
    let found = run(&["refute", "p \\/ ~p"]);
    assert_eq!(code(&found), 0);
    assert!(!stdout(&found).is_empty());

    let none = run(&["refute", "p -> p"]);
    assert_eq!(code(&none), 1);
    assert_eq!(stdout(&none), "none\n");
}

#[test]
fn refute_rejects_out_of_range_world_counts() {
    for worlds in ["0", "9"] {
        let output = run(&["refute", "p", "--max-worlds", worlds]);
        assert_eq!(code(&output), 2, "worlds = {worlds}");
        assert!(stderr(&output).starts_with("error:"));
    }
}
