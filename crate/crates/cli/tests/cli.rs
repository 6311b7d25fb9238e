//! End-to-end tests of the command-line surface: output contracts, exit
//! codes, the family-document pipeline, and checkpoint/resume.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coverfam"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("coverfam-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn formulas_line_contract() {
    let out = run(&["formulas", "--n", "12", "--k", "4", "--t", "1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        "f1=87 f2=75 f3=75 max=f1 threshold=1536 in_range=false"
    );

    let out = run(&["formulas", "--n", "1536", "--k", "4", "--t", "1"]);
    assert!(stdout(&out).contains("in_range=true"));

    // k >= t+3 violated: parameter error
    let out = run(&["formulas", "--n", "12", "--k", "4", "--t", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn formulas_json_carries_identical_data() {
    let out = run(&["formulas", "--n", "12", "--k", "4", "--t", "1", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["f1"], "87");
    assert_eq!(v["f2"], "75");
    assert_eq!(v["f3"], "75");
    assert_eq!(v["max"], "f1");
    assert_eq!(v["threshold"], "1536");
    assert_eq!(v["in_range"], false);
}

#[test]
fn formulas_range_sweep() {
    let out = run(&["formulas", "--n", "12", "--k", "4", "--t", "1", "--n-to", "14"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("n=12 f1=87"));
    assert!(lines[1].starts_with("n=13 f1=100"));
}

#[test]
fn construct_tau_covers_pipeline() {
    let doc = tmp("c3.fam");
    let out = run(&[
        "construct", "--variant", "c3", "--n", "12", "--k", "4", "--t", "1",
        "--out", doc.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "sets=75 tau=(3,3) intersecting_covers=true");

    let out = run(&["tau", "--in", doc.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "tau=3 covers=10 tau2=3 intersecting_covers=true");

    let out = run(&["covers", "--in", doc.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.trim().lines();
    assert!(lines.next().unwrap().starts_with("tau=3 covers=10"));
    // ten covers, all inside the default zone {1..5}
    let covers: Vec<&str> = lines.collect();
    assert_eq!(covers.len(), 10);
    assert_eq!(covers[0], "1 2 3");
    for c in covers {
        for e in c.split(' ') {
            assert!(e.parse::<u32>().unwrap() <= 5);
        }
    }
    std::fs::remove_file(&doc).ok();
}

#[test]
fn construct_c1_signature() {
    let out = run(&["construct", "--variant", "c1", "--n", "12", "--k", "4", "--t", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "sets=87 tau=(3,1) intersecting_covers=true");

    let out = run(&["construct", "--variant", "c9", "--n", "12", "--k", "4", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tau_of_handwritten_triangle() {
    let doc = tmp("triangle.fam");
    std::fs::write(&doc, "coverfam-family v1\nn=5 k=2 t=1\n1 2\n1 3\n2 3\n").unwrap();
    let out = run(&["covers", "--in", doc.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert!(lines[0].starts_with("tau=2 covers=3"));
    assert_eq!(&lines[1..], &["1 2", "1 3", "2 3"]);
    std::fs::remove_file(&doc).ok();
}

#[test]
fn malformed_document_reports_line() {
    let doc = tmp("bad.fam");
    std::fs::write(&doc, "coverfam-family v1\nn=5 k=2 t=1\n2 1\n").unwrap();
    let out = bin().args(["tau", "--in", doc.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("line 3"), "stderr: {err}");
    std::fs::remove_file(&doc).ok();
}

#[test]
fn search_small_cell() {
    let witness = tmp("w.fam");
    let out = run(&[
        "search", "--n", "5", "--k", "2", "--t", "1", "--s", "2",
        "--out", witness.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("value=3 status=proved-optimal"));
    let doc = std::fs::read_to_string(&witness).unwrap();
    assert_eq!(doc, "coverfam-family v1\nn=5 k=2 t=1\n1 2\n1 3\n2 3\n");
    std::fs::remove_file(&witness).ok();
}

#[test]
fn search_budget_checkpoint_resume_roundtrip() {
    let ck = tmp("search.ck");
    let out = run(&[
        "search", "--n", "7", "--k", "3", "--t", "1", "--s", "3",
        "--node-budget", "200",
        "--checkpoint-out", ck.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("status=budget-exhausted"));

    let direct = run(&["search", "--n", "7", "--k", "3", "--t", "1", "--s", "3"]);
    assert!(direct.status.success());

    let resumed = run(&[
        "search", "--n", "7", "--k", "3", "--t", "1", "--s", "3",
        "--resume", ck.to_str().unwrap(),
    ]);
    assert!(resumed.status.success());
    let direct_value = stdout(&direct);
    let resumed_value = stdout(&resumed);
    assert_eq!(
        direct_value.split_whitespace().next(),
        resumed_value.split_whitespace().next(),
        "resumed value must match the uninterrupted one"
    );
    std::fs::remove_file(&ck).ok();
}

#[test]
fn sweep_rows() {
    let out = run(&[
        "sweep", "--n-from", "5", "--n-to", "7", "--k", "2", "--t", "1", "--s", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 3);
    for line in lines {
        assert!(line.contains("value=3 status=proved-optimal"), "{line}");
    }
}

#[test]
fn verify_lists_checks() {
    let out = run(&["verify", "--list-checks"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("min-covers-intersecting"));
    assert!(text.contains("construction-sanity"));
    assert_eq!(text.trim().lines().count(), 8);
}

#[test]
fn verify_quick_grid_passes_and_fault_injection_fails() {
    let out = run(&[
        "verify", "--grid", "quick", "--samples", "6", "--cross-samples", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("summary pass="));
    assert!(text.contains(" fail=0 "));

    let out = run(&[
        "verify", "--grid", "quick", "--samples", "0", "--cross-samples", "0",
        "--inject-fault",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("verdict=fail"));
}

#[test]
fn verify_rejects_unknown_grid() {
    let out = run(&["verify", "--grid", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_error_is_exit_2() {
    let out = run(&["formulas", "--n", "twelve", "--k", "4", "--t", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}
