use std::path::PathBuf;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tm_cli::{run_with, Env, Outcome};
use tm_core::generate::{arbitrary_source, GenConfig};

const CORPUS: [&str; 4] = ["stock_goods", "railway", "script", "propp"];

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(format!("{name}.tm"))
        .display()
        .to_string()
}

fn tm(args: &[&str]) -> Outcome {
    let argv = std::iter::once("tm").chain(args.iter().copied());
    run_with(argv, &Env::plain())
}

#[test]
fn check_clean_corpus() {
    let out = tm(&["check", &corpus("stock_goods")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains(": 0 errors, 0 warnings; 13 machines"));
    assert!(out.stderr.is_empty());
}

#[test]
fn behavior_prints_chain() {
    let out = tm(&["behavior", &corpus("railway")]);
    assert_eq!(out.code, 0);
    let expected: Vec<String> = (1..=11).map(|i| format!("E{i}")).collect();
    assert_eq!(out.stdout.lines().collect::<Vec<_>>(), expected);
}

#[test]
fn missing_file_is_usage_error() {
    let out = tm(&["check", "/nonexistent/model.tm"]);
    assert_eq!(out.code, 2);
    assert!(out
        .stderr
        .starts_with("tm: cannot read /nonexistent/model.tm"));
}

#[test]
fn help_and_bad_flags() {
    let help = tm(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("simulate"));
    assert_eq!(tm(&["check"]).code, 2);
    assert_eq!(tm(&["frobnicate", "x.tm"]).code, 2);
    assert_eq!(tm(&["render", "--json", &corpus("script")]).code, 2);
    assert_eq!(
        tm(&["check", "--strict", "--lax", &corpus("script")]).code,
        2
    );
}

#[test]
fn rule_errors_exit_one_and_block_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tm");
    std::fs::write(
        &bad,
        "machine A { create receive }\nflow A.receive -> A.create\n",
    )
    .unwrap();
    let bad = bad.display().to_string();
    let out = tm(&["check", &bad]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("error[R1]"), "{}", out.stderr);
    let out = tm(&["render", &bad]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn json_check_schema() {
    let out = tm(&["check", "--json", &corpus("propp")]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!(v["file"].as_str().unwrap().ends_with("propp.tm"));
    assert_eq!(v["summary"]["events"], 7);
    for key in ["machines", "flows", "triggers", "behavior_edges"] {
        assert!(v["summary"][key].is_u64(), "{key}");
    }
    for kind in ["create", "process", "release", "transfer", "receive"] {
        assert!(v["summary"]["stages"][kind].is_u64(), "{kind}");
    }
    assert_eq!(v["diagnostics"], Value::Array(vec![]));

    let both = tm(&["check", "--json", &corpus("propp"), &corpus("script")]);
    let arr: Value = serde_json::from_str(&both.stdout).unwrap();
    assert_eq!(arr.as_array().unwrap().len(), 2);
    assert!(arr[1]["file"].as_str().unwrap().ends_with("script.tm"));
}

#[test]
fn json_diagnostics_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tm");
    std::fs::write(&bad, "machine A { create }\nflow A.create -> B.transfer\n").unwrap();
    let out = tm(&["check", "--json", &bad.display().to_string()]);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let d = &v["diagnostics"][0];
    assert_eq!(d["severity"], "error");
    assert_eq!(d["line"], 2);
    assert!(d["col"].as_u64().unwrap() >= 1);
    assert!(d["code"].is_string() && d["message"].is_string());
}

#[test]
fn events_table_and_json() {
    let out = tm(&["events", &corpus("stock_goods")]);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert!(lines[0].starts_with("ID"));
    assert_eq!(lines.len(), 11);
    let out = tm(&["events", "--json", &corpus("stock_goods")]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let events = v["events"].as_array().unwrap();
    assert_eq!(events.len(), 10);
    assert_eq!(events[2]["id"], "E3");
    assert_eq!(events[2]["after"], serde_json::json!(["E1"]));
    assert_eq!(
        events[2]["size"].as_u64().unwrap() as usize,
        events[2]["stages"].as_array().unwrap().len() + events[2]["arcs"].as_array().unwrap().len()
    );
}

#[test]
fn multiple_inputs_keep_order() {
    let files: Vec<String> = CORPUS.iter().map(|n| corpus(n)).collect();
    let mut args = vec!["behavior"];
    args.extend(files.iter().map(String::as_str));
    let out = tm(&args);
    assert_eq!(out.code, 0);
    let headers: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("==> "))
        .collect();
    let expected: Vec<String> = files.iter().map(|f| format!("==> {f} <==")).collect();
    assert_eq!(headers, expected);
}

#[test]
fn simulate_ends_with_token_listing() {
    let out = tm(&["simulate", &corpus("stock_goods")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out
        .stdout
        .lines()
        .any(|l| l.starts_with("token=t1 at=Shelf.receive")));
    assert!(out
        .stdout
        .lines()
        .all(|l| l.starts_with("step=") || l.starts_with("token")));
}

#[test]
fn render_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.dot");
    let out = tm(&[
        "render",
        "--mode",
        "behavior",
        "--rankdir",
        "tb",
        "-o",
        &target.display().to_string(),
        &corpus("script"),
    ]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.starts_with("digraph") && text.contains("rankdir=TB"));
}

#[test]
fn fmt_in_place_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.tm");
    std::fs::copy(corpus("railway"), &path).unwrap();
    let p = path.display().to_string();
    assert_eq!(tm(&["fmt", &p]).code, 0);
    let once = std::fs::read(&path).unwrap();
    assert_eq!(tm(&["fmt", &p]).code, 0);
    assert_eq!(std::fs::read(&path).unwrap(), once);
    let stdout = tm(&["fmt", "-o", "-", &p]);
    assert_eq!(stdout.stdout.as_bytes(), once.as_slice());
    assert_eq!(tm(&["fmt", "-o", "x.tm", &p, &p]).code, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The exit code is 0 exactly when no error diagnostic appears.
    #[test]
    fn exit_code_tracks_errors(seed in any::<u64>(), truncate in 0.0f64..1.0) {
        let src = arbitrary_source(&mut ChaCha8Rng::seed_from_u64(seed), &GenConfig::default());
        let cut = src.char_indices().map(|(i, _)| i).nth((src.chars().count() as f64 * truncate) as usize).unwrap_or(src.len());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.tm");
        std::fs::write(&path, &src[..cut]).unwrap();
        let out = tm(&["check", &path.display().to_string()]);
        let errors = out.stderr.lines().filter(|l| l.contains(": error[")).count();
        prop_assert_eq!(out.code == 0, errors == 0);
        prop_assert!(out.code <= 1);
    }
}
