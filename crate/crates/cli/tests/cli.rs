use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_code-forge")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn certify_design_writes_exact_rationals() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(&["build-frs", "--q", "16", "--s", "4", "--n", "3", "--k", "3", "--out", s(d)]).status.success());
    let code = d.join("code.json");
    let out = run(&["certify-design", "--code", s(&code), "--r", "2", "--out", s(d)]);
    assert_eq!(out.status.code(), Some(0));
    let cert = json(&d.join("certificate.json"));
    assert_eq!(cert["r_max"], 2);
    assert_eq!(cert["subspaces_scanned"], 546);
    for t in cert["tau_hat"].as_array().unwrap() {
        assert!(t["num"].is_i64() && t["den"].is_i64());
    }
}

#[test]
fn verify_lemmas_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-lemmas", "--seed", "7", "--trials", "200", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&dir.path().join("lemmas.json"));
    assert_eq!(v["suites"].as_array().unwrap().len(), 4);
}

#[test]
fn default_composition_bundle_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = run(&["compose-ael", "--out", s(d)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["code.json", "outer.json", "inner.json", "graph.json", "certificates.json", "report.json", "manifest.json"] {
        assert!(d.join(f).exists(), "{f} missing");
    }
    let report = json(&d.join("report.json"));
    assert_eq!(report["theorem"]["verdict"], "pass");
    assert_eq!(report["theorem"]["rate"]["composed"], serde_json::json!({"num": 1, "den": 64}));
    let rep = run(&["report", s(d)]);
    assert_eq!(rep.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&rep.stdout).contains("rate R_composed = R_out * R_in"));
}

#[test]
fn manifest_hashes_match_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(&["build-graph", "--n", "8", "--d", "3", "--seed", "4", "--out", s(d)]).status.success());
    let m = json(&d.join("manifest.json"));
    assert_eq!(m["command"], "build-graph");
    assert_eq!(m["seed"], 4);
    for a in m["artifacts"].as_array().unwrap() {
        let bytes = fs::read(d.join(a["file"].as_str().unwrap())).unwrap();
        let digest = code_forge::io::sha256_hex(&bytes);
        assert_eq!(a["sha256"].as_str().unwrap(), digest);
    }
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let out = run(&["search-inner", "--q", "2", "--k-in", "2", "--s", "4", "--d", "3", "--r", "1", "--epsilon", "1/2", "--seed", "9", "--out", s(d)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["inner.json", "inner-certificate.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn composition_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(&["build-outer", "--q", "2", "--k-in", "2", "--n", "4", "--big-k", "2", "--out", s(d)]).status.success());
    assert!(run(&["search-inner", "--q", "2", "--k-in", "2", "--s", "16", "--d", "4", "--r", "2", "--epsilon", "1/2", "--out", s(d)])
        .status
        .success());
    assert!(run(&["build-graph", "--n", "4", "--kind", "complete", "--out", s(d)]).status.success());
    let out = run(&[
        "compose-ael",
        "--outer",
        s(&d.join("outer.json")),
        "--inner",
        s(&d.join("inner.json")),
        "--graph",
        s(&d.join("graph.json")),
        "--out",
        s(d),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&d.join("report.json"))["theorem"]["hypothesis"]["holds"], true);
}

#[test]
fn scan_over_budget_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(&["build-frs", "--q", "16", "--s", "4", "--n", "3", "--k", "3", "--out", s(d)]).status.success());
    let out = run(&["check-decoding", "--code", s(&d.join("code.json")), "--r", "3", "--out", s(d)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the budget"));
}

#[test]
fn certificate_for_another_code_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = d.join("a");
    let b = d.join("b");
    assert!(run(&["build-frs", "--q", "8", "--s", "2", "--n", "3", "--k", "2", "--out", s(&a)]).status.success());
    assert!(run(&["build-frs", "--q", "8", "--s", "2", "--n", "3", "--k", "3", "--out", s(&b)]).status.success());
    assert!(run(&["certify-design", "--code", s(&a.join("code.json")), "--r", "1", "--out", s(&a)]).status.success());
    let out = run(&[
        "check-decoding",
        "--code",
        s(&b.join("code.json")),
        "--certificate",
        s(&a.join("certificate.json")),
        "--out",
        s(d),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("code_hash"));
}

#[test]
fn decoding_checks_on_a_small_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(run(&["build-frs", "--q", "4", "--s", "1", "--n", "3", "--k", "2", "--out", s(d)]).status.success());
    let code = d.join("code.json");
    for extra in [
        vec!["--check", "list-decoding", "--r", "3"],
        vec!["--check", "list-recovery", "--ell", "2", "--epsilon", "1"],
        vec!["--check", "curve", "--ell", "1", "--r", "2", "--epsilon", "1", "--trials", "20"],
    ] {
        let mut args = vec!["check-decoding", "--code", s(&code), "--out", s(d)];
        args.extend(extra);
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn plan_params_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["plan-params", "--ell", "2", "--rate", "1/2", "--epsilon", "1/2", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let plan = json(&dir.path().join("plan.json"));
    assert_eq!(plan["list_size"], 4);
    assert_eq!(plan["eps0_exact"], serde_json::json!({"num": 1, "den": 128}));
    assert_eq!(run(&["plan-params", "--ell", "1", "--rate", "1/2", "--epsilon", "1/2", "--out", s(dir.path())]).status.code(), Some(2));
}
