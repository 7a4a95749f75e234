use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcstab")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    (out.status.code().expect("exit code"), serde_json::from_slice(&out.stdout).expect("JSON report"))
}

#[test]
fn ranges_table() {
    let (code, v) = json(&["ranges", "--family", "sp", "--qmax", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "bcstab.report/1");
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["q"], 3);
    assert_eq!(rows[0]["r0"], 20);
    assert_eq!(rows[1]["r1"], 20);
    let md = String::from_utf8(run(&["ranges", "--family", "oR", "--d", "2", "--format", "md"]).stdout).unwrap();
    assert!(md.contains("| 2 | 12 | – |"), "{md}");
}

#[test]
fn homotopy_text() {
    let out = run(&["verify-homotopy", "--l", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("l=3 residual=0 terms="), "{text}");
    assert!(text.ends_with("status: PASS\n"));
}

#[test]
fn quillen_report_is_deterministic() {
    let args = [
        "verify-quillen",
        "--family",
        "u",
        "--rank",
        "4",
        "--seed",
        "7",
        "--samples",
        "5",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 7);
    // (q, i) with q ≤ 2 and i ≤ q + 1.
    assert_eq!(v["result"]["cells"].as_array().unwrap().len(), 2 + 3 + 4);
}

#[test]
fn trace_certificate() {
    let (code, v) = json(&["trace", "--q", "4", "--r", "40", "--family", "sp"]);
    assert_eq!(code, 0);
    assert!(v["result"]["certificate"]["nodes"].as_array().unwrap().len() > 1);
    let (code, v) = json(&["trace", "--q", "3", "--r", "19", "--family", "sp"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["failure"]["j"], 3);
    assert_eq!(v["result"]["decide"], false);
}

#[test]
fn other_subcommands_pass() {
    for args in [
        &["delta", "--l", "4"][..],
        &["verify-formed", "--family", "soR", "--d", "3", "--rank", "2", "--samples", "4"][..],
        &["witt", "--family", "oC1", "--rank", "2", "--samples", "4", "--seed", "3"][..],
    ] {
        let (code, v) = json(args);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_eq!(v["pass"], true);
    }
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["ranges", "--family", "gl"][..],
        &["ranges", "--family", "oC0", "--d", "1"][..],
        &["verify-quillen", "--family", "soC"][..],
        &["verify-quillen", "--family", "soR", "--d", "2"][..],
        &["trace", "--q", "3"][..],
        &["frobnicate"][..],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}
