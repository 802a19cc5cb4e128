use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn crgjms(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crgjms")).args(args).current_dir(dir).env_remove("CRGJMS_CACHE").output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eigentable_row_and_basis_dimension() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(crgjms(d, &["spectrum", "--degree", "4"]).status.success());
    let csv = fs::read_to_string(d.join("out/eigentable.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "1,1,3,8,0,16"));

    let first = crgjms(d, &["basis", "--degree", "12"]);
    assert!(first.status.success());
    assert!(String::from_utf8_lossy(&first.stderr).contains("built"));
    let b = json(&d.join("out/basis.json"));
    assert_eq!(b["dimension"], 819);
    assert_eq!(b["matches_formula"], true);
    let second = crgjms(d, &["basis", "--degree", "12"]);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit"));

    assert!(crgjms(d, &["basis", "--degree", "0", "--out", "zero"]).status.success());
    assert_eq!(json(&d.join("zero/basis.json"))["dimension"], 1);
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert_eq!(crgjms(d, &["basis", "--n", "5"]).status.code(), Some(2));
    assert_eq!(crgjms(d, &["basis", "--taylor-depth", "0"]).status.code(), Some(2));
    assert_eq!(crgjms(d, &["spectrum", "--perturbation", "missing.json"]).status.code(), Some(2));

    fs::write(d.join("u.json"), r#"{"epsilon": 0.05, "terms": [{"p":1,"q":1,"index":0,"coefficient":1}]}"#).unwrap();
    assert_eq!(crgjms(d, &["qcurv", "solve", "--perturbation", "u.json"]).status.code(), Some(2));
    fs::write(d.join("q.json"), r#"{"terms": [{"p":1,"q":0,"index":0,"coefficient":1},{"p":0,"q":1,"index":0,"coefficient":1}]}"#)
        .unwrap();
    let out = crgjms(d, &["qcurv", "check", "--degree", "4", "--q-data", "q.json"]);
    assert_eq!(out.status.code(), Some(3));
    let rep = json(&d.join("out/solvability.json"));
    assert_eq!(rep["solvable"], false);
    assert_eq!(rep["obstruction_norm"], rep["q_norm"]);

    assert_eq!(crgjms(d, &["spectrum", "--degree", "4", "--out", "v", "--verify"]).status.code(), Some(2));
    assert!(crgjms(d, &["spectrum", "--degree", "4", "--out", "v"]).status.success());
    assert_eq!(crgjms(d, &["spectrum", "--degree", "5", "--out", "v", "--verify"]).status.code(), Some(4));
}

#[test]
fn perturbed_float_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    fs::write(
        d.join("u.json"),
        r#"{"epsilon": 0.05, "terms": [{"p":1,"q":0,"index":0,"coefficient":"1/2+1/3i"},{"p":0,"q":1,"index":0,"coefficient":"1/2-1/3i"},{"p":1,"q":1,"index":1,"coefficient":1}]}"#,
    )
    .unwrap();
    let base = ["--mode", "float", "--degree", "8", "--perturbation", "u.json"];
    let with = |cmd: &[&'static str]| -> Vec<&'static str> { [cmd, &base[..]].concat() };
    assert!(crgjms(d, &with(&["qcurv", "compute"])).status.success());
    assert_eq!(json(&d.join("out/qhat.json"))["total_q"]["pass"], true);
    assert!(crgjms(d, &with(&["qcurv", "solve"])).status.success());
    let rep = json(&d.join("out/solve_report.json"));
    assert_eq!(rep["solvable"], true);
    assert!(rep["final_q_norm"].as_f64().unwrap() < 1e-6);
    assert!(d.join("out/upsilon_sol.csv").exists());
    let m = json(&d.join("out/manifest.json"));
    assert_eq!(m["inputs"].as_array().unwrap().len(), 1);
    assert!(crgjms(d, &[&with(&["qcurv", "solve"])[..], &["--verify"]].concat()).status.success());

    assert!(crgjms(d, &with(&["parametrix-check"])).status.success());
    let chain = json(&d.join("out/chain.json"));
    assert_eq!(chain["mode"], "float");
    assert!(chain["residuals"]["P*G + Pi - I"]["interior"].as_f64().unwrap() < 1e-8);
}

#[test]
fn unperturbed_float_matches_exact_eigentable() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(crgjms(d, &["spectrum", "--degree", "6", "--out", "e"]).status.success());
    assert!(crgjms(d, &["spectrum", "--degree", "6", "--mode", "float", "--out", "f"]).status.success());
    let mut exact: Vec<f64> = json(&d.join("e/spectrum.json"))["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let mut float: Vec<f64> = json(&d.join("f/spectrum.json"))["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    exact.sort_by(f64::total_cmp);
    float.sort_by(f64::total_cmp);
    assert_eq!(exact.len(), float.len());
    for (a, b) in exact.iter().zip(&float) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn sweep_emits_per_degree_files() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    assert!(crgjms(d, &["parametrix-check", "--sweep", "4..6"]).status.success());
    for k in 4..=6 {
        let c = json(&d.join(format!("out/chain_N{k}.json")));
        assert_eq!(c["ranks"]["R0"], 1);
    }
    assert!(d.join("out/sweep_summary.json").exists());
    assert!(crgjms(d, &["spectrum", "--sweep", "4..6", "--out", "s"]).status.success());
    assert_eq!(json(&d.join("s/sweep_summary.json"))["stable"], true);
    let m = json(&d.join("s/manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 7);
}

#[test]
fn selftest_reports_every_identity() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let a = crgjms(d, &["heisenberg-selftest", "--dims", "1,2", "--seed", "3", "--out", "a"]);
    assert!(a.status.success());
    let r = json(&d.join("a/selftest.json"));
    assert_eq!(r["all_passed"], true);
    assert_eq!(r["dimensions"], serde_json::json!([1, 2]));
    assert!(crgjms(d, &["heisenberg-selftest", "--dims", "1,2", "--seed", "4", "--out", "b"]).status.success());
    assert_eq!(json(&d.join("b/selftest.json"))["all_passed"], true);
}
