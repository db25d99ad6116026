use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn modframe(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modframe"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing {key} in {v}"))
}

#[test]
fn random_then_certify_parseval() {
    let dir = tempfile::tempdir().unwrap();
    let out = modframe(&["random", "parseval", "--signature", "1,2", "--d", "2", "--n", "4", "--seed", "3", "--out", "f.json"], dir.path());
    assert!(out.status.success());
    let cert = stdout_json(&modframe(&["certify", "f.json"], dir.path()));
    assert!(num(&cert, "parseval_eps") < 1e-10);
    assert!((num(&cert, "lower") - 1.0).abs() < 1e-10);
    assert_eq!(cert["is_frame"], Value::Bool(true));
}

#[test]
fn random_output_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let a = modframe(&["random", "frame", "--signature", "2", "--seed", "9"], dir.path());
    let b = modframe(&["random", "frame", "--signature", "2", "--seed", "9"], dir.path());
    let c = modframe(&["random", "frame", "--signature", "2", "--seed", "10"], dir.path());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn frame_commands_produce_expected_frames() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(modframe(&["random", "frame", "--signature", "1,1", "--d", "2", "--n", "4", "--seed", "1", "--out", "g.json"], p).status.success());

    let parseval = stdout_json(&modframe(&["parsevalize", "g.json"], p));
    std::fs::write(p.join("pf.json"), parseval["frame"].to_string()).unwrap();
    let cert = stdout_json(&modframe(&["certify", "pf.json"], p));
    assert!(num(&cert, "parseval_eps") < 1e-9);

    let eq = stdout_json(&modframe(&["equalize", "g.json"], p));
    std::fs::write(p.join("eq.json"), eq["frame"].to_string()).unwrap();
    assert!(num(&stdout_json(&modframe(&["certify", "eq.json"], p)), "equal_inner_eps") < 1e-9);

    let complement = stdout_json(&modframe(&["naimark", "pf.json"], p));
    assert!(num(&complement["certificate"], "parseval_eps") < 1e-9);
    assert_eq!(complement["frame"]["d"], Value::from(2));

    assert!(modframe(&["random", "unit-norm", "--d", "2", "--n", "4", "--delta", "0.2", "--out", "u.json"], p).status.success());
    let flowed = stdout_json(&modframe(&["cfm", "u.json", "--max-iter", "20"], p));
    let residuals = flowed["residuals"].as_array().unwrap();
    assert!(!residuals.is_empty() && residuals.len() <= 21);
}

#[test]
fn paulsen_with_both_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(modframe(&["random", "near-eip", "--signature", "1", "--d", "2", "--n", "4", "--eps", "0.05", "--out", "f.json"], p).status.success());
    for solver in ["alternation", "operator-scaling"] {
        let r = stdout_json(&modframe(&["paulsen", "f.json", "--solver", solver, "--tol", "1e-10"], p));
        assert_eq!(r["converged"], Value::Bool(true), "{solver}");
        assert!(num(&r, "final_parseval_eps") < 1e-6, "{solver}");
        assert!(num(&r, "final_equal_inner_eps") < 1e-6, "{solver}");
    }
}

#[test]
fn projection_imp_and_scaling() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(modframe(&["random", "projection", "--signature", "1,1", "--d", "4", "--n", "2", "--eps", "0.1", "--out", "p.json"], p).status.success());
    let r = stdout_json(&modframe(&["project", "p.json", "--tol", "1e-9"], p));
    assert_eq!(r["bound_ok"], Value::Bool(true));
    assert!(num(&r, "idempotence_error") < 1e-6);

    for (seed, name) in [("1", "a.json"), ("2", "b.json")] {
        let args = ["random", "parseval", "--signature", "1,1", "--d", "2", "--n", "3", "--seed", seed, "--out", name];
        assert!(modframe(&args, p).status.success());
    }
    let out = modframe(&["imp-check", "a.json", "b.json"], p);
    let r = stdout_json(&out);
    assert!(num(&r, "dist_sq") >= 0.0 && num(&r, "image_dist_sq") >= 0.0);

    assert!(modframe(&["random", "tuple", "--signature", "1", "--k", "3", "--m", "2", "--n", "2", "--seed", "4", "--out", "t.json"], p).status.success());
    let r = stdout_json(&modframe(&["scale", "t.json"], p));
    assert_eq!(r["converged"], Value::Bool(true));
    assert!(num(&r, "nearly_eps") < 1e-6);
}

#[test]
fn probes_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(modframe(&["random", "unit-columns", "--signature", "1", "--d", "4", "--out", "m.json"], p).status.success());
    let r = stdout_json(&modframe(&["bt-search", "m.json", "--min-card", "2"], p));
    assert!(r["sigma"].as_array().unwrap().len() >= 2);
    let g = stdout_json(&modframe(&["bt-search", "m.json", "--min-card", "2", "--greedy"], p));
    assert!(g["sigma"].is_array());

    let r = stdout_json(&modframe(&["jl-trial", "--signature", "1,1", "--big-n", "16", "--points", "4", "--m", "12", "--seed", "7"], p));
    assert!(r["success"].is_boolean());
}

#[test]
fn malformed_input_reports_file_and_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("bad.json"), "{\"signature\": [1], \"d\": 2, \"vectors\": [[[[[1, 0]]]]]}").unwrap();
    let out = modframe(&["certify", "bad.json"], p);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json") && err.contains("$.vectors[0]"), "{err}");

    std::fs::write(p.join("syntax.json"), "{\"signature\": [1],\n \"d\": }").unwrap();
    let err = String::from_utf8_lossy(&modframe(&["certify", "syntax.json"], p).stderr).to_string();
    assert!(err.contains("line 2"), "{err}");

    let out = modframe(&["certify", "missing.json"], p);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));
}

#[test]
fn usage_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(modframe(&[], p).status.code(), Some(2));
    std::fs::write(p.join("c.json"), "{\"kind\": \"imp\"}").unwrap();
    assert_eq!(modframe(&["--config", "c.json", "certify", "x.json"], p).status.code(), Some(2));
    std::fs::write(p.join("bad.json"), "{\"kind\": \"imp\", \"d\": 3, \"n\": 2}").unwrap();
    let out = modframe(&["--config", "bad.json"], p);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));
}

#[test]
fn config_run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("c.json"), "{\"kind\": \"imp\", \"signature\": [1, 1], \"d\": 2, \"n\": 3, \"trials\": 6}").unwrap();
    let out = modframe(&["--config", "c.json", "--seed", "11", "--tol", "1e-9", "--out", "run"], p);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(p.join("run.csv")).unwrap();
    assert!(csv.starts_with("trial,dist_sq,"));
    assert_eq!(csv.lines().count(), 7);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(p.join("run.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["seed"], Value::from(11));
    assert_eq!(summary["config"]["tol"], Value::from(1e-9));
    assert_eq!(summary["violations"], Value::Array(vec![]));
    assert!(summary["aggregates"].is_object());

    let again = modframe(&["--config", "c.json", "--seed", "11", "--tol", "1e-9"], p);
    assert!(again.status.success());
    assert_eq!(String::from_utf8_lossy(&again.stdout), csv);
}

#[test]
fn probe_experiments_never_fail_the_process() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    std::fs::write(p.join("jl.json"), "{\"kind\": \"jl\", \"signature\": [1], \"trials\": 8, \"m\": 1}").unwrap();
    let out = modframe(&["--config", "jl.json"], p);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
