//! Sweep runner: determinism, the locked golden CSV and the CLI binary.

use std::process::Command;

use onebit_joint::harness::{self, ExperimentConfig, Method};
use onebit_joint::solver::ExtractionMode;

const GOLDEN: &str = include_str!("golden/sweep_seed7.csv");

/// The configuration behind `golden/sweep_seed7.csv`; the same grid as
/// `sweep --n 40 --k 3 --m 20,40 --p 2,4 --trials 8 --seed 7`.
fn golden_config() -> ExperimentConfig {
    ExperimentConfig {
        n: 40,
        k: 3,
        m_values: vec![20, 40],
        p_values: vec![2, 4],
        trials: 8,
        seed: 7,
        extraction: ExtractionMode::KnownK(3),
        ..ExperimentConfig::default()
    }
}

fn render(cfg: &ExperimentConfig, workers: usize) -> String {
    let cells = harness::run_sweep_with_workers(cfg, workers).unwrap();
    let mut buf = Vec::new();
    harness::write_csv(&cells, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

#[test]
fn sweep_matches_golden_file() {
    assert_eq!(render(&golden_config(), 1), GOLDEN);
}

#[test]
fn sweep_is_identical_across_runs_and_worker_counts() {
    let cfg = golden_config();
    let a = render(&cfg, 1);
    assert_eq!(a, render(&cfg, 1));
    assert_eq!(a, render(&cfg, 4));
}

#[test]
fn joint_and_baseline_see_the_same_trials() {
    let cfg = ExperimentConfig { m_values: vec![30], p_values: vec![1], trials: 5, ..golden_config() };
    // with one sensor the baseline is the joint solver plus a 1-of-1 vote
    let joint = harness::run_sweep(&cfg).unwrap();
    let base = harness::run_sweep(&ExperimentConfig { method: Method::Baseline, ..cfg }).unwrap();
    assert_eq!(joint, base);
}

#[test]
fn file_output_equals_stdout_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let cells = harness::run_sweep(&golden_config()).unwrap();
    harness::emit_csv(&cells, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), GOLDEN);
}

fn sweep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sweep"))
}

#[test]
fn cli_reproduces_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("golden.csv");
    let status = sweep()
        .args(["--n", "40", "--k", "3", "--m", "20,40", "--p", "2,4", "--trials", "8", "--seed", "7", "--workers", "2"])
        .arg("--out")
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), GOLDEN);
}

#[test]
fn cli_writes_csv_to_stdout_and_config_to_stderr() {
    let out = sweep()
        .args(["--n", "20", "--k", "2", "--m", "10", "--p", "2", "--trials", "2", "--print-config"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with(harness::CSV_HEADER));
    assert_eq!(stdout.lines().count(), 2);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("indexing = 0-based"));
}

#[test]
fn cli_rejects_bad_configuration_and_unwritable_output() {
    for args in [&["--k", "0"][..], &["--m", "5:1"], &["--alpha", "1.5"], &["--trials", "0"]] {
        let out = sweep().args(args).output().unwrap();
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
    let out = sweep()
        .args(["--n", "10", "--k", "1", "--m", "5", "--p", "1", "--trials", "1", "--out", "/nonexistent/dir/x.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
}
