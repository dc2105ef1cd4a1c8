//! End-to-end runs of the `fracpois` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracpois(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracpois")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and rows of a CSV report, skipping the `#` manifest lines.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let header = reader.headers().unwrap().iter().map(str::to_string).collect();
    let rows = reader.records().map(|r| r.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON report")
}

fn column(report: &Value, key: &str) -> Vec<f64> {
    report["data"].as_array().unwrap().iter().map(|row| row[key].as_f64().unwrap()).collect()
}

#[test]
fn poisson_pmf_table() {
    let out = fracpois(&["pmf", "--nu", "1", "--lambda", "1", "--t", "1", "--kmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for line in ["# command: pmf", "# nu: 1", "# lambda: 1", "# t: 1", "# kmax: 3"] {
        assert!(text.contains(line), "missing {line:?} in\n{text}");
    }
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["k", "probability"]);
    let mut factorial = 1.0;
    for (k, row) in rows.iter().enumerate() {
        if k > 0 {
            factorial *= k as f64;
        }
        let want = (-1.0f64).exp() / factorial;
        let got: f64 = row[1].parse().unwrap();
        assert_eq!(row[0], k.to_string());
        assert!((got - want).abs() <= 1e-14 * want, "k={k}: {got} vs {want}");
    }
    assert_eq!(rows.len(), 4);
}

#[test]
fn moments_report_the_poisson_variance() {
    let out = fracpois(&["moments", "--nu", "1", "--alpha", "0.5", "--lambda", "1", "--t", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["meta"]["command"], "moments");
    assert_eq!(report["meta"]["params"]["alpha"], 0.5);
    let rows = report["data"].as_array().unwrap();
    let var = rows.iter().find(|r| r["quantity"] == "var_frac_integral").unwrap()["value"].as_f64().unwrap();
    assert!((var - std::f64::consts::FRAC_2_PI).abs() <= 1e-15, "{var}");
    let mean = rows.iter().find(|r| r["quantity"] == "mean_frac_integral").unwrap()["value"].as_f64().unwrap();
    assert!((mean - 0.752_252_778_063_675_1).abs() <= 1e-15, "{mean}");
}

#[test]
fn fractional_moments_leave_unknown_closed_forms_empty() {
    let out = fracpois(&["moments", "--nu", "0.5", "--alpha", "0.5", "--lambda", "1", "--t", "1", "--format", "json"]);
    let report = json(&out);
    let rows = report["data"].as_array().unwrap();
    assert_eq!(rows[1]["value"].as_f64(), Some(1.0));
    assert!(rows.iter().find(|r| r["quantity"] == "var_frac_integral").unwrap()["value"].is_null());
}

#[test]
fn poisson_verification_passes() {
    let out = fracpois(&[
        "verify",
        "--nu",
        "1",
        "--alpha",
        "1",
        "--lambda",
        "1",
        "--t",
        "1",
        "--n-paths",
        "1000000",
        "--seed",
        "42",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv_rows(&stdout(&out));
    let z = header.iter().position(|h| h == "z_score").unwrap();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let z: f64 = row[z].parse().unwrap();
        assert!(z.abs() <= 4.0, "{row:?}");
    }
}

#[test]
fn verification_failure_exits_one() {
    let out = fracpois(&["verify", "--lambda", "1", "--t", "1", "--n-paths", "2000", "--z-limit", "1e-9"]);
    assert_eq!(out.status.code(), Some(1));
    let (_, rows) = csv_rows(&stdout(&out));
    assert!(rows.iter().any(|r| r.last().unwrap() == "false"));
}

#[test]
fn invalid_parameters_exit_two() {
    for args in [
        &["pmf", "--nu", "1.5", "--lambda", "1", "--t", "1"][..],
        &["pmf", "--lambda", "-1", "--t", "1"],
        &["pmf", "--lambda", "1"],
        &["bivariate", "--lambda", "1", "--s", "2", "--t", "1"],
        &["verify", "--lambda", "1", "--t", "1", "--n-paths", "0"],
        &["waiting", "--lambda", "1", "--t", "1", "--k", "0"],
        &["skellam", "--lambda", "1", "--beta", "0", "--t", "1"],
        &["pmf", "--lambda", "1", "--t", "1", "--format", "xml"],
    ] {
        let out = fracpois(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--output", &p]);
    let out = fracpois(&full);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    std::fs::read(path).unwrap()
}

#[test]
fn same_manifest_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let sim = [
        "simulate",
        "--nu",
        "0.7",
        "--alpha",
        "1.5",
        "--lambda",
        "2",
        "--t",
        "3",
        "--seed",
        "9",
        "--n-paths",
        "500",
        "--workers",
        "3",
    ];
    let a = run_to(dir.path(), "a.csv", &sim);
    let b = run_to(dir.path(), "a.csv", &sim);
    assert_eq!(a, b);
    let mut other = sim.to_vec();
    other[10] = "10";
    assert_ne!(a, run_to(dir.path(), "a.csv", &other));

    let verify = [
        "verify",
        "--nu",
        "0.8",
        "--lambda",
        "1",
        "--t",
        "1",
        "--n-paths",
        "20000",
        "--workers",
        "2",
        "--format",
        "json",
    ];
    assert_eq!(run_to(dir.path(), "v.json", &verify), run_to(dir.path(), "v.json", &verify));
}

#[test]
fn simulate_columns_are_consistent() {
    let out = fracpois(&["simulate", "--lambda", "2", "--t", "1", "--n-paths", "200", "--format", "json"]);
    let report = json(&out);
    assert_eq!(report["meta"]["params"]["n_paths"], 200);
    let rows = report["data"].as_array().unwrap();
    assert_eq!(rows.len(), 200);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row["path"].as_u64(), Some(i as u64));
        let (a, rl) = (row["path_integral"].as_f64().unwrap(), row["rl_integral"].as_f64().unwrap());
        assert!((a - rl).abs() <= 1e-12 * a.max(1.0));
        assert!(a <= row["count"].as_f64().unwrap());
    }
}

#[test]
fn bivariate_grid_reduces_to_poisson() {
    let out = fracpois(&["bivariate", "--lambda", "1", "--s", "0.5", "--t", "1", "--r", "2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let p = column(&report, "probability");
    assert_eq!(p.len(), 6);
    // cell (k, r) = (1, 2): e^{-1} · 0.5 · 0.5
    let want = (-1.0f64).exp() * 0.25;
    assert!((p[4] - want).abs() <= 1e-10 * want, "{}", p[4]);
}

#[test]
fn waiting_time_of_first_event_is_the_interarrival_law() {
    let out =
        fracpois(&["waiting", "--nu", "0.6", "--lambda", "1.5", "--t", "2", "--points", "20", "--format", "json"]);
    let report = json(&out);
    let (f, g) = (column(&report, "interarrival_density"), column(&report, "waiting_density"));
    assert_eq!(f.len(), 20);
    for (a, b) in f.iter().zip(&g) {
        assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
    }
    let s = column(&report, "survival");
    assert!(s.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn skellam_table_and_verification() {
    let out = fracpois(&["skellam", "--lambda", "2", "--beta", "1", "--t", "1", "--r", "30", "--format", "json"]);
    let report = json(&out);
    let total: f64 = column(&report, "probability").iter().sum();
    assert!((total - 1.0).abs() < 1e-10, "{total}");

    let out = fracpois(&[
        "skellam",
        "--lambda",
        "2",
        "--beta",
        "1",
        "--t",
        "1",
        "--verify",
        "--n-paths",
        "200000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = csv_rows(&stdout(&out));
    assert_eq!(rows[0][0], "integral_diff_mean");
    assert_eq!(rows[0][1], "0.5");
    assert_eq!(rows[1][1], "1");
}

#[test]
fn floats_carry_seventeen_significant_digits() {
    let out = fracpois(&["pmf", "--nu", "0.5", "--lambda", "1", "--t", "1", "--kmax", "5"]);
    let (_, rows) = csv_rows(&stdout(&out));
    for row in &rows {
        let digits = row[1].trim_start_matches("0.").split('e').next().unwrap().replace('.', "");
        let significant = digits.trim_start_matches('0');
        assert!(significant.len() <= 17, "{}", row[1]);
        let x: f64 = row[1].parse().unwrap();
        assert_eq!(format!("{:.16e}", x).parse::<f64>().unwrap(), x);
    }
}
