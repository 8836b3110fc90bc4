use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fisher-dimer")).args(args).env_remove("FISHER_DIMER_TOL").output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn field(csv_text: &str, row: usize, column: &str) -> String {
    let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
    let idx = reader.headers().unwrap().iter().position(|h| h == column).unwrap_or_else(|| panic!("no column {column}"));
    reader.records().nth(row).unwrap().unwrap()[idx].to_string()
}

#[test]
fn table_at_right_angle() {
    let text = stdout(&["table", "--theta", "pi/4", "--quantity", "P_wz,P_vv,J"]);
    let p_wz: f64 = field(&text, 0, "P_wz").parse().unwrap();
    let p_vv: f64 = field(&text, 0, "P_vv").parse().unwrap();
    let j: f64 = field(&text, 0, "J").parse().unwrap();
    let s = std::f64::consts::SQRT_2;
    assert!((p_vv - (0.5 + s / 4.0)).abs() < 1e-13);
    assert!((p_wz - p_vv / 2.0).abs() < 1e-13);
    assert!((j - (1.0 + s).ln() / 2.0).abs() < 1e-13);
}

#[test]
fn probabilities_match_closed_forms() {
    let text = stdout(&["prob", "--edge", "wz", "--edge", "vv", "--radius", "5"]);
    for row in 0..2 {
        let p: f64 = field(&text, row, "probability").parse().unwrap();
        let c: f64 = field(&text, row, "closed_form").parse().unwrap();
        assert!((p - c).abs() < 1e-10);
    }
}

#[test]
fn free_energy_json() {
    let v: Value = serde_json::from_str(&stdout(&["free-energy", "--grid", "64"])).unwrap();
    let f_i = v["f_I"].as_f64().unwrap();
    assert!((f_i + 0.929_695_398_341_610).abs() < 1e-12);
    let diff = v["f_D"].as_f64().unwrap() - v["log_sinh_sum"].as_f64().unwrap() - f_i;
    assert!(diff.abs() < 1e-12);
}

#[test]
fn build_document_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("patch.json");
    let doc = doc.to_str().unwrap();
    let first: Value = serde_json::from_str(&stdout(&["build", "--graph", "quasiperiodic:3", "--radius", "3", "--document", doc])).unwrap();
    let second: Value = serde_json::from_str(&stdout(&["build", "--graph", doc])).unwrap();
    for key in ["vertices", "edges", "faces", "fisher_vertices", "fisher_edges"] {
        assert_eq!(first[key], second[key], "{key}");
    }
    assert_eq!(second["kasteleyn_orientation"], true);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = run(&["table", "--theta", "pi/3", "-o", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("theta,"));
}

#[test]
fn configuration_errors_exit_with_two() {
    for args in [
        &["build", "--graph", "no-such-graph"][..],
        &["table", "--quantity", "bogus"],
        &["table", "--theta", "tau"],
        &["free-energy", "--cell", "builtin:kagome"],
        &["verify", "--suite", "closed-forms", "--tol", "-1"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failing_verification_exits_with_one() {
    let out = run(&["verify", "--suite", "brute-force", "--tol", "1e-30"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL brute-force"));
}

#[test]
fn verify_reports_json() {
    let v: Value = serde_json::from_str(&stdout(&["verify", "--suite", "closed-forms", "--suite", "brute-force", "--format", "json"])).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["closed-forms", "brute-force"]);
}

#[test]
fn output_is_deterministic() {
    let args = ["charpoly", "--samples", "3", "--seed", "9"];
    assert_eq!(stdout(&args), stdout(&args));
    let args = ["inverse", "--from", "centre", "--radius", "4"];
    assert_eq!(stdout(&args), stdout(&args));
}
