use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cokernel"))
        .args(args)
        .env_remove("COKERNEL_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn figures_pass() {
    let o = run(&["figures"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn decompose_degree_three() {
    let o = run(&["decompose", "--d", "3", "--reflection-sign", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    let m = j["multiplicities"].as_array().unwrap();
    assert_eq!(m.len(), 1);
    assert_eq!(m[0]["partition"], "[3]");
    assert_eq!(m[0]["multiplicity"], 1);
}

#[test]
fn decompose_degree_one() {
    let j = json(&run(&["decompose", "--d", "1"]));
    let m = j["multiplicities"].as_array().unwrap();
    assert_eq!(m.len(), 1);
    assert_eq!(m[0]["partition"], "[1]");
    assert_eq!(m[0]["multiplicity"], 1);
}

#[test]
fn decompose_degree_six_cross_checks() {
    for eps in ["1", "-1"] {
        let o = run(&["decompose", "--d", "6", "--reflection-sign", eps]);
        assert_eq!(o.status.code(), Some(0));
        let checks = json(&o)["burnside_check"].as_array().unwrap().clone();
        assert!(checks.iter().all(|c| c["agree"] == true));
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["decompose", "--d", "0"]).status.code(), Some(2));
    assert_eq!(run(&["calibrate", "--d", "2", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--d", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--signs", "1"]).status.code(), Some(2));
    assert_eq!(run(&["dims", "--edge-sign", "2"]).status.code(), Some(2));
}

#[test]
fn calibrate_rejects_forced_contradiction() {
    let o = run(&["calibrate", "--d", "2", "--edge-sign", "-1", "--reflection-sign", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("rejected"));
    assert!(err.contains("forced signs"));
    assert_eq!(json(&o)["forced_ok"], false);
}

#[test]
fn calibrate_default_budget() {
    let o = run(&["calibrate", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    let passing = j["candidates"].as_array().unwrap().iter().filter(|c| c["pass"] == true).count();
    assert_eq!(passing, 1);
    assert_eq!(j["chosen"]["epsilon"], 1);
}

#[test]
fn verify_degree_three() {
    let o = run(&["verify", "--d", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&o);
    assert_eq!(j["dims"]["top"], 56);
    assert_eq!(j["checks"]["isomorphism"], true);
    assert_eq!(j["kappa"], "1/2");
}

#[test]
fn verify_below_stable_range_fails() {
    let o = run(&["verify", "--d", "3", "--g", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let failures = json(&o)["failures"].to_string();
    assert!(failures.contains("stable range"));
}

#[test]
fn verify_anti_calibrated_reflection_sign_fails() {
    let o = run(&["verify", "--d", "2", "--g", "2", "--reflection-sign", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["checks"]["isomorphism"], false);
}

#[test]
fn output_is_reproducible() {
    let a = run(&["verify", "--d", "3", "--g", "2", "--seed", "4"]);
    let b = run(&["verify", "--d", "3", "--g", "2", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = run(&["dims", "--d", "3", "--g", "2", "--cache-dir", d]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let second = run(&["dims", "--d", "3", "--g", "2", "--cache-dir", d]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(second.status.code(), Some(0));
    run(&["dims", "--d", "3", "--g", "2", "--seed", "1", "--cache-dir", d]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn csv_and_table_formats() {
    let csv = String::from_utf8(run(&["dims", "--d", "3", "--g", "2", "--format", "csv"]).stdout).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("target,20\n"));
    let table = String::from_utf8(run(&["figures", "--format", "table"]).stdout).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("-----"));
}
