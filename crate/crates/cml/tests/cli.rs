use std::path::Path;
use std::process::{Command, Output};

use cml::config::RunConfig;

fn cml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cml"))
        .args(args)
        .env("CML_WORKERS", "1")
        .output()
        .expect("spawn cml")
}

fn body(csv: &str) -> String {
    csv.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn configuration_errors_exit_with_2() {
    assert_eq!(cml(&["moments", "--x", "abc"]).status.code(), Some(2));
    assert_eq!(cml(&["moments", "--mode", "third"]).status.code(), Some(2));
    assert_eq!(cml(&["poisson", "--q", "2,1"]).status.code(), Some(2));
    assert_eq!(cml(&["suite", "--level", "medium"]).status.code(), Some(2));
    assert_eq!(cml(&["--no-such-flag"]).status.code(), Some(2));
    assert_eq!(cml(&[]).status.code(), Some(2));
}

#[test]
fn cache_mismatch_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let first = cml(&["moments", "--x", "2000", "--cache-dir", d, "--truncation", "6"]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let again = cml(&["moments", "--x", "2000", "--cache-dir", d, "--truncation", "6"]);
    assert_eq!(body(&String::from_utf8_lossy(&first.stdout)), body(&String::from_utf8_lossy(&again.stdout)));
    let other = cml(&["moments", "--x", "2000", "--cache-dir", d, "--truncation", "5"]);
    assert_eq!(other.status.code(), Some(4));
}

#[test]
fn second_moment_emits_one_row_per_grid_point_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = cml(&["moments", "--x", "1000,3000,10000", "--mode", "second", "--workers", "1", "--csv", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ta, tb) = (read(&a), read(&b));
    let rows: Vec<&str> = ta.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4, "{ta}");
    assert!(rows[0].starts_with("x,count,s2"));
    assert_eq!(body(&ta), body(&tb));
}

#[test]
fn csv_header_round_trips_the_configuration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    let csv_path = dir.path().join("out.csv");
    let out = cml(&[
        "sieve-probe",
        "--a",
        "200",
        "--b",
        "150",
        "--trials",
        "3",
        "--seed",
        "9",
        "--save-config",
        cfg_path.to_str().unwrap(),
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let saved = RunConfig::parse(&read(&cfg_path)).unwrap();
    let embedded = RunConfig::from_csv_header(&read(&csv_path)).unwrap();
    assert_eq!(saved, embedded);
    assert_eq!((saved.sieve_a, saved.sieve_b, saved.trials, saved.seed), (200, 150, 3, 9));

    // Re-running from the saved file reproduces the body.
    let rerun = dir.path().join("rerun.csv");
    let out = cml(&["--config", cfg_path.to_str().unwrap(), "--output", rerun.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(body(&read(&csv_path)), body(&read(&rerun)));

    // A config for one command cannot drive another.
    assert_eq!(cml(&["--config", cfg_path.to_str().unwrap(), "bias"]).status.code(), Some(2));
}

#[test]
fn poisson_and_constants_commands() {
    let out = cml(&["poisson", "--q", "1,0", "--m", "400"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let row = body(&text).lines().nth(1).unwrap().to_string();
    let residual: f64 = row.split(',').nth(10).unwrap().parse().unwrap();
    assert!(residual <= 1e-6, "{row}");

    let out = cml(&["constants", "--bound", "20000"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.lines().any(|l| l.starts_with("C,")) && text.lines().any(|l| l.starts_with("scriptP1,")));
}

#[test]
fn fast_suite_exits_zero() {
    let out = cml(&["suite", "--level", "fast"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(!text.contains(",FAIL,"));
}
