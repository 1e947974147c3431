//! Drives the `vrpsd` binary end to end: generate, run, audit.

use std::path::Path;
use std::process::{Command, Output};

fn vrpsd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vrpsd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

fn generate_small(dir: &Path) {
    let out = vrpsd(&[
        "generate",
        "-o",
        dir.to_str().unwrap(),
        "--seed",
        "4",
        "--requests",
        "25",
        "--shift-starts",
        "21600,28800,50400",
    ]);
    assert!(out.status.success(), "{}", text(&out));
}

#[test]
fn generate_run_audit() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = tmp.path().join("inst");
    let runs = tmp.path().join("runs");
    generate_small(&inst);
    for f in ["matrix.csv", "requests.toml", "config.toml"] {
        assert!(inst.join(f).exists(), "{f}");
    }

    let out = vrpsd(&[
        "run",
        "--instance",
        inst.to_str().unwrap(),
        "-a",
        "hybrid",
        "--iterations",
        "3000",
        "--attempts",
        "2",
        "-o",
        runs.to_str().unwrap(),
        "--require-feasible",
    ]);
    assert!(out.status.success(), "{}", text(&out));
    assert!(
        text(&out).contains("Feasible") && text(&out).contains("2/2"),
        "{}",
        text(&out)
    );
    for f in [
        "attempt-0.toml",
        "attempt-1.toml",
        "attempt-0.jsonl",
        "summary.json",
    ] {
        assert!(runs.join(f).exists(), "{f}");
    }

    let out = vrpsd(&[
        "audit",
        "--instance",
        inst.to_str().unwrap(),
        "--solution",
        runs.join("attempt-0.toml").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out));
    assert!(text(&out).contains("deadline misses     0"));
}

#[test]
fn overrides_reach_the_solver() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = tmp.path().join("inst");
    generate_small(&inst);
    let bad = vrpsd(&[
        "run",
        "--instance",
        inst.to_str().unwrap(),
        "-a",
        "1",
        "--iterations",
        "10",
        "--set",
        "tabu.capacity=0",
    ]);
    assert_eq!(bad.status.code(), Some(2), "{}", text(&bad));
}

#[test]
fn usage_errors_are_reported() {
    let out = vrpsd(&["run", "-a", "alns", "--iterations", "5"]);
    assert!(!out.status.success());
    let out = vrpsd(&[
        "run",
        "--instance",
        "/nonexistent",
        "-a",
        "alns",
        "--iterations",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out).contains("error"));
    let out = vrpsd(&[
        "run",
        "--instance",
        "/tmp",
        "-a",
        "nine",
        "--iterations",
        "5",
    ]);
    assert!(!out.status.success());
}
