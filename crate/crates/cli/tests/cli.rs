use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sieved-pollaczek"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn eval_both_reports_band_agreement() {
    let v = json(&run(&["eval", "--b", "1", "--n", "100", "--z", "0.5", "--method", "both"]));
    assert_eq!(v["region"], "B");
    assert!(v["rel_err"].as_f64().unwrap() < 0.05);
    assert_eq!(v["log_scale"], false);
}

#[test]
fn eval_accepts_negative_complex_point() {
    let v = json(&run(&["eval", "--b", "1", "--n", "60", "--z", "-0.3,0.2", "--method", "oracle"]));
    assert!(v["oracle"]["re"].is_number());
    assert!(v.get("asymptotic").is_none());
}

#[test]
fn eval_far_point_uses_log_scale() {
    let v = json(&run(&["eval", "--b", "1", "--n", "1500", "--z", "2.5"]));
    assert_eq!(v["region"], "A");
    assert_eq!(v["log_scale"], true);
    assert!(v["oracle"]["re"].is_null());
    assert!(v["rel_err"].as_f64().unwrap() < 0.01);
}

#[test]
fn mrs_prints_edges_and_multiplier() {
    let v = json(&run(&["mrs", "--b", "1", "--n", "100"]));
    assert!((v["alpha"].as_f64().unwrap() + 0.989999854361772).abs() < 1e-11);
    assert!((v["beta"].as_f64().unwrap() - 1.00994211588278).abs() < 1e-11);
    assert!(v["l"].is_number());
    assert_eq!(v["residuals"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_exit_status_follows_outcome() {
    let ok = run(&["verify", "airy"]);
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).starts_with("airy PASS"));
    let fail = run(&["verify", "overlaps", "--b", "1", "--n", "20"]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).starts_with("overlaps FAIL"));
    let orth = run(&["verify", "orthogonality", "--b", "2", "--max-degree", "6"]);
    assert!(orth.status.success());
}

#[test]
fn missing_required_value_is_an_error() {
    let out = run(&["mrs", "--b", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n"));
}

#[test]
fn sweep_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.txt", "line -0.5 0 0.5 0 3\ntau_beta 0.05 0\nrandom 4 -2 2 -1 1 7\n");
    for format in ["csv", "jsonl"] {
        let a = dir.path().join(format!("a.{format}"));
        let b = dir.path().join(format!("b.{format}"));
        for out in [&a, &b] {
            let st = run(&[
                "sweep", "--b", "1", "--n-list", "50,100", "--grid", &grid, "--out", out.to_str().unwrap(), "--format", format,
            ]);
            assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
        }
        let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(x, y);
        let lines = String::from_utf8(x).unwrap().lines().count();
        assert_eq!(lines, if format == "csv" { 17 } else { 16 });
    }
}

#[test]
fn config_file_supplies_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(dir.path(), "grid.txt", "point 0 0\n");
    let out = dir.path().join("o.csv");
    let cfg = write(
        dir.path(),
        "run.cfg",
        &format!("# band point\nb = 1\nn-list = 50\ngrid = {grid}\nout = {}\nformat = csv\n", out.display()),
    );
    assert!(run(&["--config", &cfg, "sweep"]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("1.0000000000000000e0,50,"));
    assert!(run(&["sweep", "--config", &cfg, "--b", "2", "--n-list", "60"]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("2.0000000000000000e0,60,"));

    let mrs_cfg = write(dir.path(), "mrs.cfg", "b = 1\nn = 100\n");
    let v = json(&run(&["mrs", "--config", &mrs_cfg, "--n", "200"]));
    assert_eq!(v["n"], 200);
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "b = 1\nsped = 3\n");
    let out = run(&["--config", &cfg, "mrs", "--n", "50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn convergence_reports_fitted_order() {
    let v = json(&run(&["convergence", "--quantity", "lagrange-l", "--b", "1", "--n-list", "50,100,200"]));
    assert_eq!(v["quantity"], "lagrange-l");
    let order = v["fitted_order"].as_f64().unwrap();
    assert!(order < -0.5 && order > -1.5, "{order}");
}
