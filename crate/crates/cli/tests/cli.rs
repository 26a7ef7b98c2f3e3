use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const CYCLE: &str = "a b 1\nb c 1\nc d 1\nd a 1\n";

fn mmcut(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mmcut"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn oracle_kpart_on_a_cycle() {
    let v = json(&mmcut(&["oracle", "--problem", "kpart", "--k", "2"], CYCLE));
    assert_eq!(v["value"], 2.0);
    assert_eq!(v["parts"].as_array().unwrap().len(), 2);
}

#[test]
fn partition_reports_labels_and_caps() {
    let v = json(&mmcut(&["partition", "--k", "2"], CYCLE));
    let parts = v["parts"].as_array().unwrap();
    let mut seen: Vec<String> =
        parts.iter().flat_map(|p| p.as_array().unwrap().iter().map(|l| l.as_str().unwrap().to_string())).collect();
    seen.sort();
    assert_eq!(seen, ["a", "b", "c", "d"]);
    assert!(v["report"]["max_cut"].as_f64().unwrap() <= 2.0);
    assert!(v["report"]["max_size"].as_f64().unwrap() <= v["report"]["size_cap"].as_f64().unwrap());
}

#[test]
fn multiway_separates_terminals() {
    let v = json(&mmcut(&["multiway", "--terminals", "a,c"], CYCLE));
    let parts = v["parts"].as_array().unwrap();
    let holder = |l: &str| parts.iter().position(|p| p.as_array().unwrap().iter().any(|x| x == l)).unwrap();
    assert_ne!(holder("a"), holder("c"));
}

#[test]
fn sse_accepts_json_input() {
    let doc = r#"{"edges": [["x", "y"], ["y", "z"], ["z", "w"]]}"#;
    let v = json(&mmcut(&["--format", "json", "sse", "--rho", "0.5"], doc));
    let best = json(&mmcut(&["--format", "json", "oracle", "--problem", "sse", "--rho", "0.5"], doc));
    assert_eq!(v["objective"], best["objective"]);
    assert_eq!(v["report"]["boundary"], 1.0);
}

#[test]
fn gen_output_parses_back() {
    let out = mmcut(&["gen", "--family", "grid", "--rows", "2", "--cols", "3"], "");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    let v = json(&mmcut(&["oracle", "--problem", "fixed-size", "--size", "3"], &text));
    assert_eq!(v["cut"], 3.0);
}

#[test]
fn gap_reports_ratio() {
    let v = json(&mmcut(&["gap", "--k", "4"], ""));
    // the centre's part cuts the k-1 other leaves
    assert_eq!(v["integral"], 3.0);
    let ratio = v["integral"].as_f64().unwrap() / v["fractional"].as_f64().unwrap();
    assert!((v["ratio"].as_f64().unwrap() - ratio).abs() < 1e-9);
    assert!(v["max_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn bench_is_reproducible() {
    let args = ["bench", "--strategies", "pipeline-exact,greedy", "--seeds", "0,1"];
    let a = mmcut(&args, "");
    let b = mmcut(&args, "");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn errors_map_to_exit_codes() {
    assert_eq!(mmcut(&["partition", "--k", "2"], "a b c d e\n").status.code(), Some(4));
    assert_eq!(mmcut(&["multiway", "--terminals", "a,zz"], CYCLE).status.code(), Some(4));
    assert_eq!(mmcut(&["bench", "--strategies", "magic"], "").status.code(), Some(4));
    assert_eq!(mmcut(&["sse", "--rho", "0.9"], CYCLE).status.code(), Some(4));
}
