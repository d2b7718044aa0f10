use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const ONE_UNIFORM: &str = r#"{
  "schema_version": 1,
  "instance": {"items": [{"value": {"family": "uniform", "lo": 0.0, "hi": 1.0},
                          "cost": {"family": "uniform", "lo": 0.0, "hi": 1.0}}]},
  "strategy": "best-single",
  "costs": {"mode": "fixed", "values": [0.0]},
  "seed": 5,
  "samples": 100000
}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_intermediary"));
    cmd.args(args);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(csv: &str, column: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    row[header.iter().position(|h| *h == column).unwrap()].to_string()
}

#[test]
fn myerson_revenue_from_the_command_line() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "one.json", ONE_UNIFORM);
    let o = run(&["simulate"], Some(&cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = stdout(&o);
    let analytic: f64 = field(&csv, "revenue_analytic").parse().unwrap();
    let mc: f64 = field(&csv, "revenue_mc").parse().unwrap();
    let se: f64 = field(&csv, "mc_stderr").parse().unwrap();
    assert!((analytic - 0.25).abs() < 1e-9);
    assert!((mc - analytic).abs() < 4.0 * se);
    assert_eq!(field(&csv, "runtime_ms"), "");
}

#[test]
fn identical_runs_write_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "one.json", ONE_UNIFORM);
    let a = run(&["simulate", "--seed", "17", "--samples", "50000"], Some(&cfg));
    let b = run(&["simulate", "--seed", "17", "--samples", "50000", "--threads", "3"], Some(&cfg));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["simulate", "--seed", "18", "--samples", "50000"], Some(&cfg));
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn price_reports_menu_and_payments() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "one.json", ONE_UNIFORM);
    let out = dir.path().join("price.json");
    let o = run(&["price", "--out", out.to_str().unwrap()], Some(&cfg));
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["result"]["menu"]["prices"][0].as_f64().unwrap(), 0.5);
    let pay = v["payments"][0]["payment_if_sold"].as_f64().unwrap();
    assert!((pay - 0.25).abs() < 1e-4, "{pay}");
}

#[test]
fn oracle_matches_myerson() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "one.json", ONE_UNIFORM);
    let o = run(&["oracle", "--oracle-m", "200"], Some(&cfg));
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["revenue"].as_f64().unwrap() - 0.25).abs() < 0.01);
}

#[test]
fn config_errors_exit_2_and_name_the_field() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (ONE_UNIFORM.replace("\"schema_version\": 1", "\"schema_version\": 2"), "schema_version"),
        (ONE_UNIFORM.replace("\"samples\": 100000", "\"samples\": 0"), "samples"),
        (ONE_UNIFORM.replace("\"best-single\"", "\"best-triple\""), "strategy"),
        (ONE_UNIFORM.replacen("\"hi\": 1.0},\n", "\"hi\": 1.0, \"extra\": 1},\n", 1), "instance"),
        (ONE_UNIFORM.replace("\"values\": [0.0]", "\"values\": [0.0, 0.1]"), "costs.values"),
        (ONE_UNIFORM.replace("\"best-single\"", "\"k-limited\""), "params.k"),
        (ONE_UNIFORM.replace("\"lo\": 0.0, \"hi\": 1.0},\n", "\"lo\": 1.0, \"hi\": 0.0},\n"), "instance"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = write(&dir, &format!("bad{i}.json"), text);
        let o = run(&["simulate"], Some(&cfg));
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(2), "case {i}: {err}");
        assert!(err.contains(field), "case {i}: {err}");
    }
    assert_eq!(run(&["simulate"], None).status.code(), Some(2));
    assert_eq!(run(&["simulate"], Some(&dir.path().join("missing.json"))).status.code(), Some(2));
    assert_eq!(run(&["bogus"], None).status.code(), Some(2));
}

#[test]
fn oversized_oracle_is_a_resource_error() {
    let dir = TempDir::new().unwrap();
    let item = r#"{"value": {"family": "uniform", "lo": 0.0, "hi": 1.0}, "cost": {"family": "uniform", "lo": 0.0, "hi": 1.0}}"#;
    let items = [item; 6].join(",");
    let text = format!(
        r#"{{"schema_version": 1, "instance": {{"items": [{items}]}}, "strategy": "anonymous-reserve",
            "costs": {{"mode": "fixed", "values": [0, 0, 0, 0, 0, 0]}}, "samples": 10, "payments": false}}"#
    );
    let cfg = write(&dir, "big.json", &text);
    let o = run(&["oracle", "--oracle-m", "500"], Some(&cfg));
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn empty_suite_writes_a_header_and_succeeds() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "empty.json", r#"{"schema_version": 1}"#);
    let o = run(&["suite"], Some(&cfg));
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn generated_suite_reports_every_row_and_ratio() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "suite.json",
        r#"{"schema_version": 1,
            "generator": {"count": 4, "n_min": 2, "n_max": 2, "seed": 3,
                          "strategies": ["anonymous-reserve", "cascade"],
                          "samples": 5000, "payments": false,
                          "oracle": {"enabled": true, "m": 30}}}"#,
    );
    let out = dir.path().join("suite.csv");
    let o = run(&["suite", "--out", out.to_str().unwrap(), "--timings"], Some(&cfg));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    let ratio = header.iter().position(|h| h == "ratio").unwrap();
    let runtime = header.iter().position(|h| h == "runtime_ms").unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let x: f64 = r[ratio].parse().unwrap();
        assert!(x >= 0.48, "{r:?}");
        assert!(!r[runtime].is_empty());
    }
    let summary = String::from_utf8_lossy(&o.stderr);
    assert!(summary.contains("anonymous-reserve") && summary.contains("min_ratio"));
}

#[test]
fn check_rejects_unknown_criteria() {
    let o = run(&["check", "--criterion", "42"], None);
    assert_eq!(o.status.code(), Some(2));
}
