//! Integration tests for the `subdiv` binary: exit codes, error reporting,
//! payload routing, byte determinism, and the matrices → jsr pipeline
//! reproducing the analyze bracket.
//!
//! Every invocation clears `SUBDIV_JSR_THREADS` first so the ambient
//! environment cannot leak in; the determinism test then sets it explicitly.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn subdiv(args: &[&str]) -> Output {
    subdiv_with_threads(args, None)
}

fn subdiv_with_threads(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_subdiv"));
    cmd.args(args).env_remove("SUBDIV_JSR_THREADS");
    if let Some(t) = threads {
        cmd.env("SUBDIV_JSR_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

/// Unique scratch file; removed on drop.
struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str, contents: Option<&str>) -> Self {
        static COUNTER: AtomicU32 = AtomicU32::new(0);
        let path = std::env::temp_dir().join(format!(
            "subdiv-cli-{}-{}-{tag}",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        if let Some(text) = contents {
            std::fs::write(&path, text).unwrap();
        }
        Scratch(path)
    }

    fn path(&self) -> &str {
        self.0.to_str().unwrap()
    }

    fn read(&self) -> Vec<u8> {
        std::fs::read(&self.0).unwrap()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.0);
    }
}

#[test]
fn analyze_certifies_the_tension_family_and_exits_zero() {
    let out = subdiv(&[
        "analyze",
        fixture("fourpoint.json").to_str().unwrap(),
        "--interval",
        "3/64",
        "1/16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["order"], 2);
    assert_eq!(v["ell"], 1);
    assert_eq!(v["convergent"], 1);
    let lo = v["gamma_lo"].as_f64().unwrap();
    let hi = v["gamma_hi"].as_f64().unwrap();
    assert!((lo - 0.375).abs() <= 1e-6 && (hi - 0.375).abs() <= 1e-6);
    assert!(v["alpha_lower"].as_f64().unwrap() >= 1.4140);
}

#[test]
fn analyze_uncertifiable_scheme_exits_three_with_report() {
    // The piecewise-constant scheme has radius exactly 1 on zeroth
    // differences: the analysis completes but certifies nothing.
    let out = subdiv(&["analyze", fixture("haar.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["convergent"], -1);
    assert_eq!(v["alpha_lower"].as_f64().unwrap(), 0.0);
    assert_eq!(v["gamma_hi"].as_f64().unwrap(), 1.0);
}

#[test]
fn usage_and_input_errors_exit_two() {
    // clap: unknown subcommand / missing required argument.
    assert_eq!(subdiv(&["bogus"]).status.code(), Some(2));
    assert_eq!(subdiv(&["analyze"]).status.code(), Some(2));

    // Missing input file: the message names the path.
    let out = subdiv(&["analyze", "no-such-scheme.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cannot read"), "stderr: {err}");
    assert!(err.contains("no-such-scheme.json"), "stderr: {err}");

    // Dilation below 2 is an argument error, not a crash.
    let zeros = Scratch::new("zeros.csv", Some("1\n-1\n"));
    let out = subdiv(&["generability", zeros.path(), "--m", "1", "--window", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_scheme_json_reports_line_and_column() {
    let broken = Scratch::new("broken.json", Some("{\n  \"dim\": 1,,\n}\n"));
    let out = subdiv(&["analyze", broken.path()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("column"), "stderr: {err}");
}

#[test]
fn machine_payload_is_byte_identical_across_runs_and_thread_counts() {
    let scheme = fixture("fourpoint.json");
    let args = |out: &str| {
        vec![
            "analyze".to_string(),
            scheme.to_str().unwrap().to_string(),
            "--interval".to_string(),
            "3/64".to_string(),
            "1/16".to_string(),
            "--out".to_string(),
            out.to_string(),
        ]
    };

    let mut payloads = Vec::new();
    let mut humans = Vec::new();
    for threads in [None, None, Some("2"), Some("5")] {
        let file = Scratch::new("payload.json", None);
        let argv = args(file.path());
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let out = subdiv_with_threads(&argv, threads);
        assert_eq!(out.status.code(), Some(0));
        payloads.push(file.read());
        humans.push(out.stdout);
    }
    for other in &payloads[1..] {
        assert_eq!(&payloads[0], other, "machine payload changed between runs");
    }
    for other in &humans[1..] {
        assert_eq!(&humans[0], other, "human report changed between runs");
    }
    // With --out, stdout carries the human report, not the JSON.
    assert!(String::from_utf8_lossy(&humans[0]).starts_with("scheme:"));
}

#[test]
fn matrices_then_jsr_reproduces_the_analyze_bracket() {
    let scheme = fixture("fourpoint.json");
    let analyze = subdiv(&[
        "analyze",
        scheme.to_str().unwrap(),
        "--interval",
        "3/64",
        "1/16",
    ]);
    assert_eq!(analyze.status.code(), Some(0));
    let a = stdout_json(&analyze);

    let mats = Scratch::new("mats.json", None);
    let exported = subdiv(&[
        "matrices",
        scheme.to_str().unwrap(),
        "--interval",
        "3/64",
        "1/16",
        "--ell",
        "1",
        "--out",
        mats.path(),
    ]);
    assert_eq!(exported.status.code(), Some(0));

    let jsr = subdiv(&["jsr", mats.path()]);
    assert_eq!(jsr.status.code(), Some(0));
    let j = stdout_json(&jsr);

    // The exported matrices round-trip through decimal text losslessly, so
    // the standalone bracket must be bit-identical to the analyze bracket.
    assert_eq!(
        a["gamma_lo"].as_f64().unwrap().to_bits(),
        j["lower"].as_f64().unwrap().to_bits(),
        "lower ends differ: {} vs {}",
        a["gamma_lo"],
        j["lower"]
    );
    assert_eq!(
        a["gamma_hi"].as_f64().unwrap().to_bits(),
        j["upper"].as_f64().unwrap().to_bits(),
        "upper ends differ: {} vs {}",
        a["gamma_hi"],
        j["upper"]
    );
    assert_eq!(j["converged"], true);
}

#[test]
fn jsr_that_cannot_close_the_bracket_exits_three() {
    let mats = Scratch::new("mats.json", None);
    let exported = subdiv(&[
        "matrices",
        fixture("fourpoint.json").to_str().unwrap(),
        "--interval",
        "3/64",
        "1/16",
        "--ell",
        "1",
        "--out",
        mats.path(),
    ]);
    assert_eq!(exported.status.code(), Some(0));

    // An unreachable tolerance at depth 1 leaves the bracket open; the
    // payload is still written.
    let out = subdiv(&["jsr", mats.path(), "--depth", "1", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["converged"], false);
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
}

#[test]
fn support_prints_the_exact_interval() {
    let out = subdiv(&["support", fixture("example38.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["lower"], "-3/2");
    assert_eq!(v["upper"], "3/2");

    // Human form leads with the interval.
    let file = Scratch::new("support.json", None);
    let out = subdiv(&[
        "support",
        fixture("example38.json").to_str().unwrap(),
        "--out",
        file.path(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[-3/2, 3/2]"));
}

#[test]
fn render_emits_level_position_value_rows() {
    let out = subdiv(&[
        "render",
        fixture("fourpoint.json").to_str().unwrap(),
        "--levels",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    // The family file carries no schedule, so rendering runs fixed at the
    // first domain vertex (tension 0): one hat step from the delta.
    assert_eq!(
        lines,
        vec![
            "level,position,value",
            "0,0,1",
            "1,-0.5,0.5",
            "1,0,1",
            "1,0.5,0.5",
        ]
    );
}

#[test]
fn gamma_lists_doubling_zero_set_bases() {
    let out = subdiv(&[
        "gamma",
        fixture("haar.json").to_str().unwrap(),
        "--from",
        "1",
        "--to",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text, "r,re,im,period\n1,1,0,2\n2,2,0,4\n3,4,0,8\n");
}

#[test]
fn generability_verdicts_map_to_exit_codes() {
    // Translation-closed set: consistent, exit 0.  A single header line in
    // the CSV is tolerated.
    let mut closed = String::from("re,im\n");
    for n in 1..=8 {
        closed.push_str(&format!("{n},0\n-{n},0\n"));
    }
    let file = Scratch::new("closed.csv", Some(&closed));
    let out = subdiv(&["generability", file.path(), "--m", "2", "--window", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "consistent");
    assert_eq!(v["tested"], 8);

    // Isolated pair of zeros: no partners anywhere, exit 3 with witnesses.
    let file = Scratch::new("isolated.csv", Some("0.7\n-0.7\n"));
    let out = subdiv(&["generability", file.path(), "--m", "2", "--window", "4"]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "violation");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 2);
}
