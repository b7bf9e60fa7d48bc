use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_higgs5"));
    for var in ["HIGGS5_INPUT", "HIGGS5_SEED", "HIGGS5_SAMPLES", "HIGGS5_GRID", "HIGGS5_JOBS"] {
        c.env_remove(var);
    }
    c
}

fn run_with(mut cmd: Command, stdin: &str) -> Output {
    let mut child = cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut cmd = bin();
    cmd.args(args);
    run_with(cmd, stdin)
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

const PENCIL: &str = r#"{"pencil":{"lambda":"2","t":"3","u":"5","v":"7","c1":"1","c2":"2"}}"#;

const UNSTABLE: &str = r#"{"bundle":{"lambda":"2","t":"3","d":0,"directions":
    {"0":["1","0"],"1":["1","0"],"lambda":["1","0"],"t":["1","0"],"inf":["0","1"]}}}"#;

#[test]
fn pencil_determinant() {
    let out = run(&["higgs-det"], PENCIL);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["status"], "ok");
    // a1 = -16, a2 = -157, b1 = 104, b2 = -11
    assert_eq!(v["result"]["h1"], "2512");
    assert_eq!(v["result"]["h2"], "-1144");
}

#[test]
fn input_file_and_stdin_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pencil.json");
    std::fs::write(&path, PENCIL).unwrap();
    let from_file = run(&["higgs-det", "--input", path.to_str().unwrap()], "");
    let from_stdin = run(&["higgs-det", "--input", "-"], PENCIL);
    assert_eq!(from_file.status.code(), Some(0));
    assert_eq!(from_file.stdout, from_stdin.stdout);
}

#[test]
fn elem_keeps_the_determinant() {
    let payload = r#"{"pencil":{"lambda":"2","t":"3","u":"5","v":"7","c1":"1","c2":"2"},"mask":["t","inf"]}"#;
    let out = run(&["elem"], payload);
    assert_eq!(out.status.code(), Some(0));
    let moved = json_of(&out)["result"]["higgs"].clone();
    let det = run(&["higgs-det"], &serde_json::json!({ "higgs": moved }).to_string());
    assert_eq!(det.status.code(), Some(0));
    let v = json_of(&det);
    assert_eq!(v["result"]["h1"], "2512");
    assert_eq!(v["result"]["h2"], "-1144");
}

#[test]
fn malformed_input_exits_2() {
    let bad_rational = PENCIL.replace("\"5\"", "\"1/0\"");
    for (args, stdin) in [
        (vec!["higgs-det"], bad_rational.as_str()),
        (vec!["higgs-det"], "{not json"),
        (vec!["run"], r#"{"command":"nope","payload":{}}"#),
        (vec!["run"], r#"{"payload":{}}"#),
    ] {
        let out = run(&args, stdin);
        assert_eq!(out.status.code(), Some(2), "{args:?} {stdin}");
        assert_eq!(json_of(&out)["status"], "error");
    }
}

#[test]
fn domain_error_exits_1() {
    let out = run(&["lines"], UNSTABLE);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["status"], "error");
    assert!(v["result"].is_null());
    assert!(!v["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn stability_reports_a_witness() {
    let out = run(&["stability"], UNSTABLE);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["result"]["stability"]["class"], "unstable");
    assert_eq!(v["result"]["stability"]["value"], "-3/2");
}

#[test]
fn run_dispatches_like_the_subcommand() {
    let direct = run(&["higgs-det"], PENCIL);
    let wrapped = format!(r#"{{"command":"higgs-det","payload":{PENCIL}}}"#);
    let via_run = run(&["run"], &wrapped);
    assert_eq!(via_run.status.code(), Some(0));
    assert_eq!(direct.stdout, via_run.stdout);
}

#[test]
fn sweep_is_deterministic_across_jobs() {
    // steps counts grid points, endpoints included
    let grid = "-3:3:7,-2:2:5";
    let one = run(&["sweep", "--grid", grid, "--jobs", "1"], "");
    let four = run(&["sweep", "--grid", grid, "--jobs", "4"], "");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("h1,h2,rho,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 7 * 5);
    assert!(rows.contains(&"0,0,inf,Cone"));
}

#[test]
fn grid_from_environment() {
    let mut cmd = bin();
    cmd.arg("sweep").env("HIGGS5_GRID", "0:1:2,0:1:2");
    let out = run_with(cmd, "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}

#[test]
fn empty_grid_is_a_domain_error() {
    let out = run(&["sweep", "--grid", "0:1:0,0:1:2"], "");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_paper_passes() {
    let out = run(&["verify-paper", "--samples", "25", "--seed", "3"], "");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json_of(&out)["status"], "ok");
}

#[test]
fn help_lists_every_subcommand() {
    let out = run(&["--help"], "");
    let text = String::from_utf8(out.stdout).unwrap();
    for c in [
        "stability", "higgs-det", "higgs-space", "elem", "lines", "fiber", "nilpotent", "limit", "sweep", "verify-paper",
        "run",
    ] {
        assert!(text.contains(c), "{c}");
    }
    for flag in ["--input", "--seed", "--samples", "--grid", "--jobs"] {
        assert!(text.contains(flag), "{flag}");
    }
}
