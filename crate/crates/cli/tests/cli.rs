use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rootdistill"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const T4: [&str; 11] = ["--chebyshev", "4", "--interval", "-1", "1", "--prec", "8", "--h", "0.1", "--k", "3"];

fn with<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&T4);
    v.extend_from_slice(extra);
    v
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distill_json_report() {
    let out = run(&with("distill", &[]));
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let roots = doc["report"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 4);
    assert_eq!(roots[3]["root"], "0.92387953");
    assert_eq!(doc["config"]["k"], 3);
    assert_eq!(doc["config"]["polynomial"]["chebyshev"]["degree"], 4);
    assert_eq!(doc["report"]["map"]["order"], "2^4");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("roots: 4"));
    assert!(stderr.contains("largest root: 0.92387953"));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let path = dir.path().join(format!("r{i}.json"));
        let out = run(&with("distill", &["--threads", threads, "--out", path_str(&path)]));
        assert_eq!(out.status.code(), Some(0));
        files.push(fs::read(&path).unwrap());
    }
    // The output path is part of the echoed config, so compare after removing it.
    let strip = |b: &Vec<u8>| {
        let mut v: Value = serde_json::from_slice(b).unwrap();
        v["config"]["out"] = Value::Null;
        serde_json::to_vec(&v).unwrap()
    };
    assert_eq!(strip(&files[0]), strip(&files[1]));
    assert_eq!(files[0].len(), files[2].len());

    let same = dir.path().join("same.json");
    let first = run(&with("distill", &["--out", path_str(&same)]));
    let a = fs::read(&same).unwrap();
    let second = run(&with("distill", &["--out", path_str(&same)]));
    assert!(first.status.success() && second.status.success());
    assert_eq!(a, fs::read(&same).unwrap());
}

#[test]
fn sample_csv_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t4.csv");
    let svg = dir.path().join("t4.svg");
    let out = run(&with(
        "sample",
        &["--format", "csv", "--out", path_str(&csv), "--svg", path_str(&svg)],
    ));
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# run_config {"));
    assert_eq!(lines.next().unwrap(), "index,x,y");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 21);
    assert!(rows[10].ends_with(",Null"), "x = 0 is a critical point: {}", rows[10]);
    let svg_text = fs::read_to_string(&svg).unwrap();
    assert!(svg_text.contains("run_config"));
    assert_eq!(svg_text.matches("<circle").count(), 18);
}

#[test]
fn sample_of_linear_polynomial_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("x.json");
    fs::write(&poly, r#"{"degree": 1, "coeffs": ["0", "1"], "prec": 10}"#).unwrap();
    let out = run(&[
        "sample", "--poly", path_str(&poly), "--interval", "-1", "1", "--h", "1", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let ys: Vec<&str> = text.lines().skip(2).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(ys.len(), 3);
    assert!(ys.iter().all(|y| y.trim_start_matches('-').chars().all(|c| c == '0' || c == '.')));
}

#[test]
fn verify_against_closed_form() {
    let out = run(&with("verify", &[]));
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["distilled"], 4);
    assert_eq!(doc["oracle"], 4);
    let max: f64 = doc["max_abs_diff"].as_str().unwrap().parse().unwrap();
    assert!(max < 1e-8);
    assert!(String::from_utf8(out.stderr).unwrap().contains("distilled=4 oracle=4"));
}

#[test]
fn verify_file_polynomial_by_bisection() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("p.json");
    // (x - 0.25)(x + 0.5) = x^2 + 0.25 x - 0.125
    fs::write(&poly, r#"{"degree": 2, "coeffs": ["-0.125", "0.25", "1"], "prec": 30}"#).unwrap();
    let out = run(&[
        "verify", "--poly", path_str(&poly), "--interval", "-1", "1", "--h", "0.125", "--k", "4",
        "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(String::from_utf8(out.stderr).unwrap().contains("checked by bisection"));
}

#[test]
fn csv_report_rows() {
    let out = run(&with("distill", &["--format", "csv"]));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "index,root,error_estimate,residual,x1,x2");
    assert_eq!(lines.len(), 2 + 4);
    assert!(lines[2].starts_with("0,-0.92387953,"));
}

#[test]
fn filter_overrides_are_echoed() {
    let out = run(&with("distill", &["--error-tol", "1e-3", "--bisector-c", "0.5", "--eval", "horner"]));
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["error_tol"], "0.001");
    assert_eq!(doc["config"]["bisector_c"], "0.5");
    assert_eq!(doc["config"]["eval"], "horner");
    assert_eq!(doc["report"]["map"]["scheme"], "horner");
}

#[test]
fn invalid_configurations_exit_with_two() {
    let bad: Vec<Vec<&str>> = vec![
        vec!["distill", "--chebyshev", "4", "--interval", "1", "-1", "--prec", "8", "--h", "0.1"],
        vec!["distill", "--chebyshev", "4", "--interval", "-1", "1", "--prec", "8", "--h", "0.3"],
        vec!["distill", "--chebyshev", "4", "--interval", "-1", "1", "--prec", "0", "--h", "0.1"],
        vec!["distill", "--chebyshev", "4", "--interval", "-1", "1", "--h", "0.1"],
        vec!["distill", "--chebyshev", "4", "--interval", "-1", "1", "--prec", "8", "--h", "abc"],
        vec!["distill", "--chebyshev", "4", "--interval", "-1", "1", "--prec", "8", "--h", "0.1", "--error-tol", "-1"],
        vec!["distill", "--chebyshev", "4", "--interval", "-1", "1", "--prec", "8", "--h", "0.1", "--threads", "0"],
        vec!["distill", "--poly", "/nonexistent/p.json", "--interval", "-1", "1", "--h", "0.1"],
        vec!["distill", "--interval", "-1", "1", "--prec", "8", "--h", "0.1"],
        vec!["frobnicate"],
    ];
    for args in bad {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn malformed_polynomial_files_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("short.json", r#"{"degree": 3, "coeffs": ["1", "2"], "prec": 10}"#),
        ("lead.json", r#"{"degree": 1, "coeffs": ["1", "0"], "prec": 10}"#),
        ("extra.json", r#"{"degree": 1, "coeffs": ["1", "1"], "prec": 10, "x": 1}"#),
        ("nan.json", r#"{"degree": 1, "coeffs": ["nan", "1"], "prec": 10}"#),
    ] {
        let path = dir.path().join(name);
        fs::write(&path, body).unwrap();
        let out = run(&["distill", "--poly", path_str(&path), "--interval", "-1", "1", "--h", "0.5"]);
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
}

#[test]
fn zero_roots_is_success() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("p.json");
    fs::write(&poly, r#"{"degree": 2, "coeffs": ["1", "0", "1"], "prec": 12}"#).unwrap();
    let out = run(&["distill", "--poly", path_str(&poly), "--interval", "-1", "1", "--h", "0.25", "--k", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["report"]["roots"].as_array().unwrap().len(), 0);
    assert!(String::from_utf8(out.stderr).unwrap().contains("roots: 0"));
}

#[test]
fn long_values_are_summarized() {
    let out = run(&[
        "distill", "--chebyshev", "3", "--interval", "0.5", "1", "--prec", "300", "--h", "0.25", "--k", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let line = stderr.lines().find(|l| l.starts_with("largest root:")).unwrap();
    assert!(line.contains("...") && line.contains("(300 digits)"), "{line}");
    assert!(line.contains("0.86602540378443864676372317075293618347140262690519"));
}
