use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qlsplab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlsplab"))
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_reduce_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("chain.json");
    let out = qlsplab(&["gen", "--N", "8", "--q", "3", "--seed", "5", "--out", path_str(&chain)]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&chain).unwrap();
    assert!(text.starts_with("{\"N\":8,\"format\":\"permchain-v1\""));

    let report = stdout_json(&qlsplab(&["reduce", "--chain", path_str(&chain), "--seed", "9", "--no-timings"]));
    assert_eq!(report["N"], 8);
    assert_eq!(report["q"], 3);
    assert_eq!(report["success"], true);
    assert_eq!(report["answer"], report["truth"]);
    assert!(report.get("timings_ms").is_none());
}

#[test]
fn build_writes_matrix_market() {
    let out = qlsplab(&["build", "--N", "2", "--q", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "%%MatrixMarket matrix coordinate real general");
    assert_eq!(lines[1], "12 12 24");
    assert_eq!(lines.len(), 26);
}

#[test]
fn solve_then_sample() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("solve.json");
    let out = qlsplab(&["solve", "--N", "4", "--q", "2", "--solver", "neumann", "--eps", "0.01", "--out", path_str(&report)]);
    assert!(out.status.success());
    let solved: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(solved["truncation_k"].as_u64().unwrap() > 0);

    let out = qlsplab(&["sample", "--state", path_str(&report), "--shots", "50", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 51);
}

#[test]
fn verify_exit_codes() {
    let ok = qlsplab(&["verify", "--N", "4", "--q", "2", "--seed", "7"]);
    assert_eq!(ok.status.code(), Some(0));
    let report = stdout_json(&ok);
    assert_eq!(report["passed"], true);

    let bad = qlsplab(&["verify", "--N", "4", "--q", "2", "--seed", "7", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn bad_chain_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("bad.json");
    std::fs::write(&chain, r#"{"format":"permchain-v1","N":3,"q":1,"perms":[[0,0,1]]}"#).unwrap();
    let out = qlsplab(&["reduce", "--chain", path_str(&chain)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    std::fs::write(&chain, r#"{"format":"other","N":1,"q":1,"perms":[[0]]}"#).unwrap();
    let out = qlsplab(&["build", "--chain", path_str(&chain)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("format"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qlsplab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qlsplab(&["verify", "--level", "huge"]).status.code(), Some(2));
}

#[test]
fn env_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_qlsplab"))
        .args(["gen"])
        .env_clear()
        .env("QLSPLAB_N", "3")
        .env("QLSPLAB_Q", "2")
        .output()
        .unwrap();
    let chain = stdout_json(&out);
    assert_eq!(chain["N"], 3);
    assert_eq!(chain["perms"].as_array().unwrap().len(), 2);
}

#[test]
fn perturb_and_bench_run() {
    let out = qlsplab(&["perturb", "--kappa", "2,8", "--trials", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qlsplab(&["bench", "--sizes", "2:1,4:2", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("N,q,dim,phase,ms\n"));
    assert!(text.lines().skip(1).all(|l| l.starts_with("2,1,12,") || l.starts_with("4,2,48,")));
}
