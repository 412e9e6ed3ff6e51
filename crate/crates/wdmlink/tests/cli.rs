//! The `wdmlink` binary: exit codes and printed paths.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/ndff.toml")
}

fn wdmlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wdmlink")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&wdmlink(&["--help"])), 0);
    assert_eq!(code(&wdmlink(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&wdmlink(&[])), 1);
    assert_eq!(code(&wdmlink(&["estimate"])), 1);
    assert_eq!(code(&wdmlink(&["frobnicate"])), 1);
}

#[test]
fn plan_prints_the_files_it_wrote() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wdmlink(&["plan", "--scenario", fixture().to_str().unwrap(), "--out", out, "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert_eq!(stdout.trim(), dir.path().join("plan.csv").to_str().unwrap());
    let text = std::fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    assert_eq!(text.lines().count(), 483);
}

#[test]
fn missing_scenario_file_exits_two() {
    let o = wdmlink(&["estimate", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error: [scenario]"), "{err}");
}

#[test]
fn bad_scenario_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "[plan]\nspacing_ghz = \"wide\"\n").unwrap();
    let o = wdmlink(&["plan", "--scenario", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn plotdata_checks_its_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wdmlink(&["plotdata", "--out", out]);
    assert_eq!(code(&o), 1);
    let o = wdmlink(&["plotdata", "--report", "x.json", "--figure", "fig7"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("valid ids"));
    let o = wdmlink(&["plotdata", "--report", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn estimate_then_plotdata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wdmlink(&["estimate", "--scenario", fixture().to_str().unwrap(), "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = dir.path().join("estimate.json");
    let o = wdmlink(&["plotdata", "--report", report.to_str().unwrap(), "--figure", "fig4", "--no-svg"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("fig4.csv").exists());
    assert!(!dir.path().join("fig4.svg").exists());
}
