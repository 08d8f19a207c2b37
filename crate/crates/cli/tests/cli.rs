use std::process::{Command, Output};

use serde_json::Value;

const SCHREIER: &str = r#"{"kind":"schreier1"}"#;
const E4_E5: &str = r#"{"coords":[{"point":4,"value":"1"},{"point":5,"value":"1"}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baernstein")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn norm_of_two_tail_units() {
    let v = json(&run(&["norm", "--family", SCHREIER, "--vector", E4_E5]));
    assert_eq!(v["norm_sq"], "4/1");
    assert_eq!(v["decimal"]["norm"], "2.000000000000");
}

#[test]
fn bruteforce_agrees_with_default_path() {
    let x = r#"{"coords":[{"point":1,"value":"3"},{"point":2,"value":"-1/2"},{"point":5,"value":"2"},{"point":6,"value":"1"}]}"#;
    let a = json(&run(&["norm", "--family", SCHREIER, "--vector", x]));
    let b = json(&run(&["norm", "--bruteforce", "--family", SCHREIER, "--vector", x]));
    assert_eq!(a["norm_sq"], b["norm_sq"]);
}

#[test]
fn membership() {
    let o = run(&["family", "member", "--family", SCHREIER, "--set", "[1,2]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "false");
    let o = run(&["family", "member", "--family", SCHREIER, "--set", "[2,3]"]);
    assert_eq!(stdout(&o).trim(), "true");
}

#[test]
fn oracle_norm_agrees() {
    let o = run(&["oracle", "norm", "--max-support", "8", "--trials", "200", "--seed", "7"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "agreements: 200/200");
}

#[test]
fn oracle_day_agrees() {
    let o = run(&["oracle", "day", "--trials", "60", "--seed", "3"]);
    assert_eq!(stdout(&o).trim(), "agreements: 60/60");
}

#[test]
fn exit_codes() {
    // malformed JSON and missing inputs are usage errors
    assert_eq!(run(&["norm", "--family", "{", "--vector", E4_E5]).status.code(), Some(2));
    assert_eq!(run(&["norm", "--vector", E4_E5]).status.code(), Some(2));
    assert_eq!(run(&["norm"]).status.code(), Some(2));
    assert_eq!(run(&["--tol", "2", "daynorm", "--vector", E4_E5]).status.code(), Some(2));
    // well-formed but rejected inputs
    let bad = r#"{"kind":"explicit","sets":[[1,2]]}"#;
    assert_eq!(run(&["family", "validate", "--family", bad]).status.code(), Some(1));
    let twice = r#"{"coords":[{"point":4,"value":"1"},{"point":4,"value":"2"}]}"#;
    assert_eq!(run(&["norm", "--family", SCHREIER, "--vector", twice]).status.code(), Some(1));
    let long = (1..=20).map(|i| format!(r#"{{"point":{i},"value":"1"}}"#)).collect::<Vec<_>>().join(",");
    let long = format!(r#"{{"coords":[{long}]}}"#);
    assert_eq!(run(&["norm", "--family", SCHREIER, "--vector", &long]).status.code(), Some(1));
}

#[test]
fn probes_are_deterministic() {
    let args = ["probe", "--scenario", "separation-triple", "--count", "4"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("m,n,norm_sq_sum,delta_lower,delta_upper\n"));
    let seeded = ["oracle", "norm", "--trials", "20", "--seed", "11"];
    assert_eq!(run(&seeded).stdout, run(&seeded).stdout);
}

#[test]
fn functional_roundtrips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let p = path.to_str().unwrap();
    let o = run(&["norming", "extract", "--family", SCHREIER, "--vector", E4_E5, "--out", p]);
    assert!(o.status.success());
    let applied = json(&run(&["norming", "apply", "--functional", p, "--vector", E4_E5]));
    assert_eq!(applied["numerator"], applied["scale_sq"]);
    assert_eq!(applied["decimal"]["value"], "2.000000000000");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, format!(r#"{{"family":{SCHREIER},"digits":3}}"#)).unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&run(&["--config", c, "norm", "--vector", E4_E5]));
    assert_eq!(v["decimal"]["norm"], "2.000");
    let v = json(&run(&["--config", c, "--digits", "1", "norm", "--vector", E4_E5]));
    assert_eq!(v["decimal"]["norm"], "2.0");
    std::fs::write(&cfg, r#"{"colour":"red"}"#).unwrap();
    assert_eq!(run(&["--config", c, "norm", "--vector", E4_E5]).status.code(), Some(1));
}

#[test]
fn dual_bracket_contains_known_value() {
    let v = json(&run(&["dualnorm", "--family", SCHREIER, "--vector", E4_E5]));
    assert_eq!(v["value"], "1/1");
    assert_eq!(v["converged"], true);
}
