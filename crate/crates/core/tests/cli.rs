use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cantorcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cantorcf"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn construct_a(path: &Path) -> Output {
    cantorcf(&[
        "construct",
        "--base",
        "3",
        "--digits",
        "0,1",
        "--mode",
        "relaxed",
        "--depth",
        "3",
        "--out",
        path.to_str().unwrap(),
    ])
}

#[test]
fn construct_then_verify_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let o = construct_a(&path);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = cantorcf(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("overall: PASS"));
}

#[test]
fn tampered_certificate_fails_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    construct_a(&path);
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc["steps"][2]["p"] = Value::from("3884697838988604470");
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let o = cantorcf(&["verify", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], Value::Bool(false));
}

#[test]
fn budget_exhaustion_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json.gz");
    let o = cantorcf(&[
        "construct",
        "--base",
        "3",
        "--digits",
        "0,2",
        "--depth",
        "3",
        "--max-bits",
        "60000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", stdout(&o));
    assert!(stdout(&o).contains("budget-exhausted(2)"));
    // the truncated certificate is still valid
    let o = cantorcf(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&cantorcf(&["construct", "--base", "2", "--digits", "0,1"])), 2);
    assert_eq!(code(&cantorcf(&["construct", "--base", "3", "--digits", "0,1,2"])), 2);
    assert_eq!(code(&cantorcf(&["verify", "/nonexistent/cert.json"])), 2);
    assert_eq!(code(&cantorcf(&["frobnicate"])), 2);
}

#[test]
fn expand_prints_the_requested_digits() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    construct_a(&path);
    let o = cantorcf(&["expand", path.to_str().unwrap(), "--digits", "20"]);
    assert_eq!(code(&o), 0);
    let digits = stdout(&o).trim().to_owned();
    assert_eq!(digits, "11011011011011011011");
}

#[test]
fn cf_of_an_explicit_fraction() {
    let o = cantorcf(&["cf", "--p", "6", "--q", "13"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("[0; 2, 6]"), "{}", stdout(&o));
}

#[test]
fn demo_runs_the_first_worked_example() {
    let o = cantorcf(&["demo", "--only", "0,1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}
