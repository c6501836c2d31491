use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;

use fraclap::functions::Builtin;
use fraclap::io::*;
use fraclap::riesz::*;
use fraclap::soliton::SolitonProblem;

fn config(dir: &Path) -> RunConfig {
    RunConfig {
        out: Some(dir.to_path_buf()),
        ..Default::default()
    }
}

fn lorentz(n: usize) -> TriDomainFunction {
    let part = DomainPartition::uniform(-2.0, 2.0, 1e-2, n).unwrap();
    let grid = Arc::new(TriDomainGrid::new(RationalOrder::new(1, 2).unwrap(), part).unwrap());
    Builtin::Lorentz.sample(grid)
}

/// Column `name` of a derivative table.
fn column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

#[test]
fn lorentz_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_fracderiv(&config(dir.path())).unwrap();
    assert_eq!(report.order, "1/2");
    assert_eq!(report.function, "lorentz");
    assert!(report.closed_form_error.unwrap() <= 5e-12);
    let exact = report.exact_value_at_zero.unwrap();
    assert!((report.value_at_zero - exact).abs() <= 5e-12);

    for label in ["I", "II", "III"] {
        let path = dir.path().join(format!("derivative_{label}.csv"));
        assert_eq!(column(&path, "local_coordinate").len(), 201);
    }
    // the last outer node is x = ±∞, where the unscaled values vanish
    let x = fs::read_to_string(dir.path().join("derivative_III.csv")).unwrap();
    assert!(x.lines().last().unwrap().split(',').nth(2) == Some("inf"));
    assert_eq!(*column(&dir.path().join("derivative_III.csv"), "Dalpha_u").last().unwrap(), 0.0);

    let stored: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(stored["closed_form_error"].as_f64(), report.closed_form_error);
    assert!(dir.path().join("chebyshev.json").exists());
}

#[test]
fn sampled_function_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    let u = lorentz(32);
    save_sampled_function(&u, &path).unwrap();
    let back = load_sampled_function(&path).unwrap();
    assert_eq!(back.stacked(), u.stacked());
    assert_eq!(back.grid().partition(), u.grid().partition());
    assert_eq!(back.order(), u.order());
}

#[test]
fn mismatched_lengths_are_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    let mut doc = SampledFunction::from_function(&lorentz(16));
    doc.right.push(0.0);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let err = load_sampled_function(&path).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("uIII"), "{err}");

    let cfg = RunConfig {
        input: Some(path),
        ..config(dir.path())
    };
    assert_eq!(run_fracderiv(&cfg).unwrap_err().exit_code(), 1);
}

#[test]
fn zero_input_file_gives_zero_derivative() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    let part = DomainPartition::uniform(-1.0, 1.0, 1e-2, 24).unwrap();
    let grid = Arc::new(TriDomainGrid::new(RationalOrder::new(2, 3).unwrap(), part).unwrap());
    save_sampled_function(&TriDomainFunction::zeros(grid), &path).unwrap();
    let cfg = RunConfig {
        input: Some(path),
        alpha: Some("2/3".into()),
        ..config(dir.path())
    };
    let report = run_fracderiv(&cfg).unwrap();
    assert_eq!(report.function, "file");
    assert_eq!(report.closed_form_error, None);
    for label in ["I", "II", "III"] {
        let d = column(&dir.path().join(format!("derivative_{label}.csv")), "Dalpha_u");
        assert!(d.iter().all(|&v| v == 0.0));
    }

    let wrong_order = RunConfig {
        alpha: Some("1/2".into()),
        ..cfg
    };
    assert_eq!(run_fracderiv(&wrong_order).unwrap_err().exit_code(), 1);
}

#[test]
fn persisted_soliton_reproduces_its_residual() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        alpha: Some("4/5".into()),
        ..config(dir.path())
    };
    let report = run_soliton(&cfg).unwrap();
    assert!(report.succeeded());
    assert_eq!(report.continuation, ["9/10"]);
    assert!(report.solution.residual <= 1e-10);

    let q = load_sampled_function(&dir.path().join("solution.json")).unwrap();
    let problem = SolitonProblem::new(q.order(), *q.grid().partition(), 1.0, 0.5, 2).unwrap();
    let r = max_abs(&problem.residual(&q).unwrap());
    assert!((r - report.solution.residual).abs() <= 1e-12, "{r:e} vs {:e}", report.solution.residual);
    assert!((q.value_at(0.0) - report.solution.peak).abs() <= 1e-12);
}

#[test]
fn halted_trace_keeps_its_partial_branch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        alphas: Some("9/10,4/5".into()),
        n: Some(60),
        tol: Some(1e-16),
        max_newton: Some(1),
        ..config(dir.path())
    };
    let report = run_trace(&cfg).unwrap();
    assert!(!report.completed());
    assert_eq!(report.steps.len(), 1);
    assert!(!report.steps[0].converged);
    let stage = dir.path().join("stage_00_9-10");
    assert!(stage.join("solution.json").exists());
    assert!(stage.join("record.json").exists());
    assert!(dir.path().join("trace.json").exists());
    assert!(!dir.path().join("stage_01_4-5").exists());
}

fn fraclap(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_fraclap"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(fraclap(&["--help"]), 0);
    assert_eq!(fraclap(&["fracderiv", "--N", "16", "--out", out]), 0);
    assert_eq!(fraclap(&["fracderiv", "--alpha", "3/2", "--out", out]), 1);
    assert_eq!(fraclap(&["fracderiv", "--bogus"]), 1);
    assert_eq!(fraclap(&["fracderiv", "--input", "/nonexistent/u.json", "--out", out]), 1);
    assert_eq!(fraclap(&["--config", "/nonexistent/run.json", "fracderiv"]), 1);
    // subcritical orders are refused before any work
    assert_eq!(fraclap(&["soliton", "--alpha", "1/4", "--out", out]), 1);
    let halted = ["trace", "--alphas", "9/10,4/5", "--N", "40", "--tol", "1e-16", "--max-newton", "1", "--out", out];
    assert_eq!(fraclap(&halted), 2);
}
