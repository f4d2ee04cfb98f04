use std::fs;
use std::process::Command;

use l1tik::solvers::Method;
use l1tik_cli::experiment::{SCHEMA_LINE, SUMMARY_HEADER, TRACE_HEADER};
use l1tik_cli::{parse_config, run_experiment, ExperimentConfig, ExperimentError};

fn desk_config(out: &std::path::Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::with_solvers(&[
        Method::Ista,
        Method::Fista,
        Method::Newton,
        Method::LevenbergMarquardt,
    ]);
    cfg.noise_levels = vec![0.05, 0.10];
    cfg.output = out.to_path_buf();
    cfg.timing = false;
    cfg
}

#[test]
fn desk_sweep_rows_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let summary = run_experiment(&desk_config(dir.path())).unwrap();
    assert_eq!(summary.rows.len(), 8);
    // Regression constants from the first build (seed 42, α = δ).
    let expected = [
        (Method::Ista, 0.05, 157),
        (Method::Fista, 0.05, 27),
        (Method::Newton, 0.05, 3),
        (Method::LevenbergMarquardt, 0.05, 3),
        (Method::Ista, 0.10, 109),
        (Method::Fista, 0.10, 23),
        (Method::Newton, 0.10, 2),
        (Method::LevenbergMarquardt, 0.10, 2),
    ];
    for (row, (method, noise, n_star)) in summary.rows.iter().zip(expected) {
        assert_eq!((row.solver, row.noise_rel), (method, noise));
        assert_eq!(row.n_star, n_star, "{method} at {noise}");
        assert_eq!(row.stop_reason, "discrepancy");
        assert_eq!(row.wall_s, 0.0);
        let stem = format!("{}_{}_0", method, noise);
        let trace = fs::read_to_string(dir.path().join(format!("trace_{stem}.csv"))).unwrap();
        let mut lines = trace.lines();
        assert_eq!(lines.next(), Some(SCHEMA_LINE));
        assert_eq!(lines.next(), Some(TRACE_HEADER));
        assert_eq!(lines.count(), n_star + 1);
        let pgm = fs::read_to_string(dir.path().join(format!("recon_{stem}.pgm"))).unwrap();
        assert!(pgm.starts_with("P2\n32 32\n255\n"));
    }
    let text = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(text.starts_with(&format!("{SCHEMA_LINE}\n{SUMMARY_HEADER}\n")));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn reruns_and_threads_are_byte_identical() {
    let (a, b, c) = (
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
        tempfile::tempdir().unwrap(),
    );
    let mut cfg = desk_config(a.path());
    cfg.noise_levels = vec![0.1, 0.2];
    cfg.repetitions = 2;
    run_experiment(&cfg).unwrap();
    cfg.output = b.path().to_path_buf();
    run_experiment(&cfg).unwrap();
    cfg.output = c.path().to_path_buf();
    cfg.threads = 4;
    run_experiment(&cfg).unwrap();
    for name in ["summary.csv", "trace_newton_0.2_1.csv", "trace_ista_0.1_0.csv"] {
        let first = fs::read(a.path().join(name)).unwrap();
        assert_eq!(first, fs::read(b.path().join(name)).unwrap(), "{name}");
        assert_eq!(first, fs::read(c.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn repetitions_draw_fresh_noise() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = desk_config(dir.path());
    cfg.solvers.truncate(1);
    cfg.noise_levels = vec![0.1];
    cfg.repetitions = 2;
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!(summary.rows.len(), 2);
    assert_ne!(summary.rows[0].residual, summary.rows[1].residual);
}

#[test]
fn zero_repetitions_give_an_empty_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = desk_config(dir.path());
    cfg.repetitions = 0;
    let summary = run_experiment(&cfg).unwrap();
    assert!(summary.rows.is_empty());
    assert_eq!(
        fs::read_to_string(dir.path().join("summary.csv")).unwrap(),
        format!("{SCHEMA_LINE}\n{SUMMARY_HEADER}\n")
    );
}

#[test]
fn failed_runs_stay_in_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = desk_config(dir.path());
    cfg.solvers.truncate(1);
    cfg.noise_levels = vec![0.1];
    // A step far beyond 1/‖A‖² makes ISTA blow up.
    cfg.solvers[0].omega = l1tik::solvers::StepSize::Fixed(10.0);
    let summary = run_experiment(&cfg).unwrap();
    assert_eq!(summary.rows.len(), 1);
    assert_eq!(summary.rows[0].stop_reason, "error");
    assert!(summary.rows[0].error.as_deref().unwrap().contains("divergence"));
    let text = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("ista,0.1,0,error,"));
}

#[test]
fn unwritable_output_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = desk_config(&blocker.join("sub"));
    assert!(matches!(run_experiment(&cfg), Err(ExperimentError::OutputDir { .. })));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.conf");
    fs::write(
        &path,
        "[geometry]\nm = 16\nangles = 20\nbeams = 20\n[experiment]\nsolvers = lm, ista\nnoise = 0.1\n",
    )
    .unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!(cfg.solvers.len(), 2);
    assert_eq!(cfg.geometry.n_rows(), 400);
    assert!(parse_config(&dir.path().join("missing.conf")).is_err());
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_l1tik"))
}

#[test]
fn binary_solve_and_generate() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("small.conf");
    fs::write(&conf, "[geometry]\nm = 12\nangles = 16\nbeams = 14\n[experiment]\nsolvers = fista\ntiming = off\n").unwrap();
    let out = dir.path().join("solve");
    let status = bin()
        .args(["solve", "--solver", "newton", "--noise", "0.2", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("trace_newton_0.2_0.csv").exists());
    assert!(out.join("recon_newton_0.2_0.pgm").exists());

    let gen = dir.path().join("gen");
    let status = bin().args(["generate", "--config"]).arg(&conf).arg("--out").arg(&gen).status().unwrap();
    assert!(status.success());
    for name in ["matrix.csv", "phantom.csv", "phantom.pgm", "sinogram.csv", "sinogram_noisy.csv", "problem.txt"] {
        assert!(gen.join(name).exists(), "{name}");
    }
}

#[test]
fn binary_rejects_unknown_solver() {
    let output = bin().args(["solve", "--solver", "cgls", "--out", "/nonexistent"]).output().unwrap();
    assert!(!output.status.success());
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("available solvers"), "{err}");
}

#[test]
fn binary_verify_passes() {
    let output = bin().arg("verify").output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
}
