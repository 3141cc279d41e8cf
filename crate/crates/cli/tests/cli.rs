use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde::Deserialize;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conmorse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn conmorse")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_spec(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn constant_spec(left: f64, right: f64, v: f64, constraints: usize) -> String {
    let cons = vec![r#"{"kind":"constant","params":{"value":1}}"#; constraints].join(",");
    format!(
        r#"{{"interval":{{"left":{left},"right":{right}}},
            "potential":{{"kind":"constant","params":{{"value":{v}}}}},
            "bc":"dirichlet","constraints":[{cons}]}}"#
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn indices(json: &str) -> Vec<(String, u64)> {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v["indices"].as_object().unwrap().iter().map(|(k, n)| (k.clone(), n.as_u64().unwrap())).collect()
}

#[test]
fn benchmark_routes_agree() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "bench.json", &constant_spec(-1.0, 1.0, -25.0, 1));
    let o = run(&["morse", "--spec", s(&spec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let idx = indices(&stdout(&o));
    assert_eq!(idx.len(), 4);
    assert!(idx.iter().all(|(_, n)| *n == 2), "{idx:?}");
}

#[test]
fn free_operator_reports_zero() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "free.json", &constant_spec(0.0, 1.0, 0.0, 0));
    let out = dir.path().join("r.json");
    let o = run(&["morse", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let idx = indices(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(idx.iter().map(|x| x.1).collect::<Vec<_>>(), vec![0, 0, 0, 0]);
}

#[test]
fn reversed_interval_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "bad.json", &constant_spec(1.0, -1.0, 0.0, 0));
    let o = run(&["morse", "--spec", s(&spec)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("invalid interval"));
}

#[test]
fn schema_violations_and_bad_flags_exit_one() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "x.json", r#"{"interval":{"left":0,"right":1},"bc":"dirichlet"}"#);
    assert_eq!(run(&["morse", "--spec", s(&spec)]).status.code(), Some(1));
    assert_eq!(run(&["conjugate-scan", "--shrink-to"]).status.code(), Some(1));
    assert_eq!(run(&["morse", "--spec", s(&spec), "--frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["morse", "--spec", s(&spec), "--routes", "eigen"]).status.code(), Some(1));
    assert_eq!(run(&["nls", "--p", "-1", "--omega", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["nls", "--p", "2", "--omega", "1"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[derive(Debug, Deserialize)]
struct DefectRow {
    t: f64,
    defect: f64,
    #[allow(dead_code)]
    multiplicity: usize,
}

fn scan_rows(c: f64) -> Vec<DefectRow> {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "s.json", &constant_spec(-1.0, 1.0, -c, 1));
    let csv_path = dir.path().join("scan.csv");
    let o = run(&["conjugate-scan", "--spec", s(&spec), "--csv", s(&csv_path)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("t,defect,multiplicity\n"));
    csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>().unwrap()
}

#[test]
fn conjugate_scan_brackets_the_benchmark_points() {
    let rows = scan_rows(25.0);
    assert!(rows.windows(2).all(|w| w[0].t < w[1].t));
    for target in [0.6283, 0.8987] {
        let below = rows.iter().rev().find(|r| r.t < target - 1e-3).unwrap();
        let above = rows.iter().find(|r| r.t > target + 1e-3).unwrap();
        assert!(below.defect * above.defect < 0.0, "no sign change around {target}");
    }
    let quiet = scan_rows(9.0);
    assert!(quiet.windows(2).all(|w| w[0].defect * w[1].defect > 0.0));
}

#[test]
fn conjugate_scan_writes_a_report() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "s.json", &constant_spec(-1.0, 1.0, -25.0, 1));
    let out = dir.path().join("r.json");
    let o = run(&["conjugate-scan", "--spec", s(&spec), "--shrink-to", "0.05", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("t,defect,multiplicity\n"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["conjugate"]["index"], 2);
    assert_eq!(v["t_min"], 0.05);
}

#[derive(Debug, Deserialize)]
struct CRow {
    t: f64,
    c: f64,
    region: String,
}

fn nls(p: &str) -> (Vec<CRow>, String) {
    let o = run(&["nls", "--p", p, "--omega", "-1", "--tmax", "8", "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'));
    let verdict = lines.pop().unwrap().to_string();
    let body = lines[1..].join("\n");
    let rows = csv::Reader::from_reader(body.as_bytes()).deserialize().collect::<Result<Vec<CRow>, _>>().unwrap();
    (rows, verdict)
}

fn right_sign_changes(rows: &[CRow]) -> usize {
    let right: Vec<&CRow> = rows.iter().filter(|r| r.region == "right").collect();
    assert!(right.iter().all(|r| r.t > 1e-3));
    right.windows(2).filter(|w| (w[0].c < 0.0) != (w[1].c < 0.0)).count()
}

#[test]
fn nls_verdicts_follow_the_exponent() {
    let (rows, v) = nls("3");
    assert!(v.starts_with("verdict: ConjugatePointExists vk_slope: "), "{v}");
    assert_eq!(right_sign_changes(&rows), 1);
    let (rows, v) = nls("1");
    assert!(v.starts_with("verdict: NoConjugatePoint vk_slope: "), "{v}");
    assert_eq!(right_sign_changes(&rows), 0);
    let (_, v) = nls("2");
    assert!(v.starts_with("verdict: Critical vk_slope: "), "{v}");
    let slope: f64 = v.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(slope.abs() < 1e-6);
}

#[test]
fn nls_table_pairs_sum_to_the_slope() {
    // c(t) + c(-t) is the whole integral of 2φφ_ω, which is the VK slope.
    let (rows, v) = nls("3");
    let slope: f64 = v.rsplit(' ').next().unwrap().parse().unwrap();
    assert_eq!(rows.len(), 400);
    assert!(rows.iter().all(|r| r.t.abs() > 1e-3));
    let (left, right) = rows.split_at(200);
    for (l, r) in left.iter().rev().zip(right) {
        assert_eq!(l.t, -r.t);
        assert!((l.c + r.c - slope).abs() <= 1e-6 * (1.0 + r.c.abs()), "t = {}", r.t);
    }
}

#[test]
fn reports_are_byte_stable() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "b.json", &constant_spec(-1.0, 1.0, -16.0, 1));
    let a = run(&["morse", "--spec", s(&spec), "--routes", "direct,maslov,matrix"]);
    let b = run(&["morse", "--spec", s(&spec), "--routes", "matrix,maslov,direct"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["routes"].get("conjugate").is_none());
}

#[test]
fn constraint_matrix_and_sweep_commands() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(&dir, "b.json", &constant_spec(-1.0, 1.0, -25.0, 1));
    let o = run(&["constraint-matrix", "--spec", s(&spec)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["limit"], 1);
    let o = run(&["constraint-matrix", "--spec", s(&spec), "--lambda", "-0.5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["lambda"], -0.5);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 1);

    let csv_path = dir.path().join("evans.csv");
    let o = run(&["maslov-sweep", "--spec", s(&spec), "--csv", s(&csv_path)]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["maslov"]["index"], 2);
    assert_eq!(v["maslov"]["crossings"].as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(csv_path).unwrap();
    assert!(text.starts_with("lambda,evans\n"));
}
