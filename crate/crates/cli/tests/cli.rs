use std::process::{Command, Output};

use serde_json::Value;

fn quatring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_odd_modulus() {
    let out = quatring(&["classify", "-n", "15", "-a", "-1", "-b", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"collapse\":true,\"split\":true,\"tag\":\"HAMILTON\"}\n"
    );
}

#[test]
fn census_counts_involutions() {
    let out = quatring(&["census", "-n", "4", "-a", "-1", "-b", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["involution_count"], 32);
    let out = quatring(&["census", "-n", "4", "-a", "1", "-b", "1"]);
    assert_eq!(stdout_json(&out)["involution_count"], 64);
}

#[test]
fn census_over_budget_is_refused() {
    let out = Command::new(env!("CARGO_BIN_EXE_quatring"))
        .args(["census", "-n", "5", "-a", "1", "-b", "1"])
        .env("QUATRING_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("625"));
}

#[test]
fn witness_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let path_str = path.to_str().unwrap();
    let out = quatring(&["witness", "-n", "120", "-a", "-1", "-b", "7", "--out", path_str]);
    assert_eq!(out.status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();

    let out = quatring(&["verify", "--in", path_str]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["ok"], true);

    let printed = quatring(&["witness", "-n", "120", "-a", "-1", "-b", "7"]);
    assert_eq!(printed.stdout, first);
}

#[test]
fn corrupted_witness_names_relation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let path_str = path.to_str().unwrap();
    quatring(&["witness", "-n", "9", "-a", "2", "-b", "5", "--out", path_str]);
    let mut w: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    w["factors"][0]["phi_i"][0][0] = Value::from(1);
    std::fs::write(&path, serde_json::to_string(&w).unwrap()).unwrap();

    let out = quatring(&["verify", "--in", path_str]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("violated phi(i)^2 = a"), "{stderr}");
    assert_eq!(stdout_json(&out)["ok"], false);
}

#[test]
fn malformed_witness_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    std::fs::write(&path, "{\"source\": 3}").unwrap();
    let out = quatring(&["verify", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_forms() {
    let out = quatring(&["solve", "--form", "x^2 + y^2 = -1", "--mod", "3^6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let (x, y) = (v["x"].as_u64().unwrap(), v["y"].as_u64().unwrap());
    assert_eq!((x * x + y * y + 1) % 729, 0);

    let out = quatring(&["solve", "--form", "x^2 + y^2 = 3", "--mod", "8"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"], "NoSolution");

    let out = quatring(&["solve", "--form", "x^2 + y^2 = 1", "--mod", "12"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(quatring(&["classify", "-n", "8"]).status.code(), Some(2));
    assert_eq!(quatring(&["classify", "-n", "8", "-a", "2", "-b", "3"]).status.code(), Some(2));
    assert_eq!(quatring(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(quatring(&["crosscheck", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn crosscheck_reports_totals() {
    let out = quatring(&["--jobs", "1", "crosscheck", "--suite", "sum_two_squares_2adic", "--records"]);
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.iter().filter(|l| l["kind"] == "record").count(), 12);
    let total = lines.last().unwrap();
    assert_eq!(total["kind"], "total");
    assert_eq!(total["mismatches"], 0);
}

#[test]
fn output_is_byte_stable() {
    let args = ["witness", "-n", "48", "-a", "5", "-b", "-5"];
    assert_eq!(quatring(&args).stdout, quatring(&args).stdout);
}
