use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lp_equiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lp-equiv"))
        .args(args)
        .env_remove("LP_EQUIV_BUDGET")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn gen(dir: &Path, m: &str, n: &str, k: &str) -> String {
    let out = lp_equiv(&["gen", "--m", m, "--n", n, "--k", k, "--seed", "5"]);
    let path = dir.join(format!("inst_{m}_{n}.json"));
    fs::write(&path, &out.stdout).unwrap();
    assert!(out.status.success());
    path.to_string_lossy().into_owned()
}

#[test]
fn gen_spark_and_pstar_on_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    fs::write(&csv, "1,1,1\n1,2,3\n").unwrap();
    let path = csv.to_str().unwrap();
    let spark = json(&lp_equiv(&["spark", "--input", path]));
    assert_eq!(spark["spark"], 3);
    assert_eq!(spark["witness"], serde_json::json!([0, 1, 2]));
    let pstar = json(&lp_equiv(&["pstar", "--input", path]));
    let p = pstar["p_star"].as_f64().unwrap();
    assert!((p - 1.3469e-3).abs() < 1e-6, "{p}");
    let r = json(&lp_equiv(&["restricted-spec", "--input", path, "--k", "2"]));
    assert_eq!(r["k"], 2);
}

#[test]
fn solvers_round_trip_through_gen_output() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "3", "7", "1");
    let l0 = json(&lp_equiv(&["solve-l0", "--input", &inst]));
    assert_eq!(l0["level"], 1);
    let lp = json(&lp_equiv(&["solve-lp", "--input", &inst, "--p", "0.001"]));
    assert_eq!(
        lp["minimizers"][0]["support"],
        l0["solutions"][0]["support"]
    );
    let out = lp_equiv(&["--format", "csv", "solve-l0", "--input", &inst]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("level,support\n1,"));
}

#[test]
fn theorem_harnesses_emit_reports() {
    let dir = tempfile::tempdir().unwrap();
    let wide = gen(dir.path(), "2", "6", "1");
    let t1 = json(&lp_equiv(&["verify-thm1", "--input", &wide, "--k", "1"]));
    assert_eq!(t1["recovered"], true);
    let t2 = json(&lp_equiv(&["verify-thm2", "--input", &wide, "--k", "2"]));
    assert_eq!(t2["k"], 2);
    let narrow = gen(dir.path(), "3", "5", "2");
    let t3 = json(&lp_equiv(&["verify-thm3", "--input", &narrow]));
    assert_eq!(t3["k"], 2);
    let out = lp_equiv(&["--format", "csv", "verify-thm3", "--input", &narrow]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("instance,p,class,count,margin_min\n"));
}

#[test]
fn audits_cover_every_selector() {
    let dir = tempfile::tempdir().unwrap();
    let inst = gen(dir.path(), "3", "6", "1");
    for lemma in ["2", "3", "phi"] {
        json(&lp_equiv(&["audit", "--lemma", lemma]));
    }
    let bu = json(&lp_equiv(&["audit", "--lemma", "bu", "--input", &inst]));
    assert_eq!(bu["spark"], 4);
    let chain = json(&lp_equiv(&["audit", "--lemma", "chain", "--input", &inst]));
    assert!(chain["steps"].as_array().unwrap().len() > 5);
    let out = lp_equiv(&["audit", "--lemma", "bu"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_writes_manifest_and_honours_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "seed = 7\nm = 2\nn = 5\ninstances = 2\nlemma_trials = 100\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = lp_equiv(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "suite",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["asserted_pass"], true);
    assert!(manifest["config"].as_str().unwrap().contains("seed = 7"));
    assert!(out_dir.join("phase_diagram.csv").is_file());
}

#[test]
fn budget_env_and_bad_config_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lp-equiv"))
        .args(["--out", dir.path().to_str().unwrap(), "suite"])
        .env("LP_EQUIV_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "m = 0\n").unwrap();
    let out = lp_equiv(&["--config", cfg.to_str().unwrap(), "suite"]);
    assert_eq!(out.status.code(), Some(2));
}
