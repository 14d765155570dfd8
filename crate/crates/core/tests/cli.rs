//! The command line, driven in-process through `lgla::cli::run`.

use std::path::PathBuf;

use lgla::cli::{run, EXIT_INCONCLUSIVE, EXIT_MALFORMED, EXIT_OK, EXIT_VIOLATIONS};
use serde_json::Value;

fn lgla(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("lgla").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lgla-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn construct(name: &str, extra: &[&str], radius: &str) -> PathBuf {
    let path = scratch(&format!("{name}-{radius}.json"));
    let mut args = vec!["construct", "--name", name, "--box", radius, "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let (code, _, err) = lgla(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    path
}

#[test]
fn construct_then_verify() {
    let path = construct("wpi", &["--pi", "1,0;0,i"], "3");
    let (code, out, _) = lgla(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["jacobi_violations"], 0);
    assert_eq!(v["box"], 3);
}

#[test]
fn verify_reports_violations() {
    let path = construct("witt", &[], "2");
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entries = v["entries"].as_array_mut().unwrap();
    let c: i64 = entries[0]["c"].as_str().unwrap().parse().unwrap();
    entries[0]["c"] = Value::String((c + 1).to_string());
    let bad = scratch("witt-broken.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let (code, out, _) = lgla(&["verify", "--in", bad.to_str().unwrap()]);
    assert_eq!(code, EXIT_VIOLATIONS, "{out}");
}

#[test]
fn classify_writes_report() {
    let path = construct("a1_1", &[], "6");
    let report = scratch("a1_1-report.json");
    let (code, out, _) = lgla(&["classify", "--in", path.to_str().unwrap(), "--report", report.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("integrable type 1"), "{out}");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(v["tag"], "integrable");
}

#[test]
fn classify_tiny_box_is_inconclusive() {
    let path = construct("witt", &[], "1");
    let (code, _, _) = lgla(&["classify", "--in", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_INCONCLUSIVE);
}

#[test]
fn analyze_runs() {
    let path = construct("witt", &[], "4");
    let (code, out, _) = lgla(&["--seed", "7", "analyze", "--in", path.to_str().unwrap(), "--trials", "20"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn lmin_table() {
    let (code, out, err) = lgla(&["lmin", "--delta", "2", "--s", "1/5", "--window", "8"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("level,degree,x,dim,stable,interior"));
    assert!(lines.any(|l| l.starts_with("3,")));
    assert!(out.lines().any(|l| l.starts_with("-3,")));
}

#[test]
fn oracle_symbol_indices() {
    let (code, out, _) = lgla(&["oracle", "--lambda", "1,0", "--mu", "0,1"]);
    assert_eq!(code, EXIT_OK);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["bracket"]["coeff"].is_string());
}

#[test]
fn malformed_inputs() {
    assert_eq!(lgla(&["verify", "--in", "/nonexistent/structure.json"]).0, EXIT_MALFORMED);
    assert_eq!(lgla(&["construct", "--name", "nope", "--box", "2"]).0, EXIT_MALFORMED);
    assert_eq!(lgla(&["frobnicate"]).0, EXIT_MALFORMED);
    assert_eq!(lgla(&["--field", "Q", "construct", "--name", "wpi", "--pi", "1,0;0,i", "--box", "1"]).0, EXIT_MALFORMED);
}
