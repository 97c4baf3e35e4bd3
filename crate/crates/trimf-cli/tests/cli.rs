//! End-to-end tests of the binary surface: JSON round trips, exit
//! codes, and the negative control for tampered documents.

use std::process::{Command, Output};

fn trimf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn mf_emits_the_rank_six_document() {
    let out = trimf(&["mf", "--weights", "2,3,5", "--bundle", "E6", "--field", "q"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["weights"], serde_json::json!([2, 3, 5]));
    assert_eq!(doc["rows"].as_array().unwrap().len(), 12);
    assert_eq!(doc["symmetric"], serde_json::json!(true));
    assert!(doc["v"].is_null());
}

#[test]
fn mf_round_trips_through_check() {
    let dir = std::env::temp_dir().join("trimf-cli-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("e4.json");
    let out = trimf(&[
        "mf",
        "--weights",
        "2,3,4",
        "--bundle",
        "E4@tau=2",
        "--field",
        "f5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = trimf(&["check", path.to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], serde_json::json!(true));
    assert_eq!(doc["symmetric"], serde_json::json!(true));
    assert_eq!(doc["reduced"], serde_json::json!(true));
    // indecomposability over F5 needs p > dim End = 1; it certifies
    assert_eq!(doc["indecomposable"], serde_json::json!(true));
}

#[test]
fn check_rejects_a_tampered_document_with_located_residual() {
    let dir = std::env::temp_dir().join("trimf-cli-tamper");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g3.json");
    let out = trimf(&[
        "mf",
        "--weights",
        "2,3,5",
        "--bundle",
        "G3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    // flip the sign of one coefficient
    let tampered = text.replacen("\"coef\": \"1\"", "\"coef\": \"-1\"", 1);
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();
    let out = trimf(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("residual at ("), "stderr: {err}");
}

#[test]
fn check_reports_parse_errors_with_location() {
    let dir = std::env::temp_dir().join("trimf-cli-parse");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{ \"weights\": [2,3,5], ").unwrap();
    let out = trimf(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("line") && err.contains("column"),
        "stderr: {err}"
    );
}

#[test]
fn unknown_bundle_lists_valid_names() {
    let out = trimf(&["mf", "--weights", "2,3,5", "--bundle", "E9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("E6"), "stderr: {err}");
}

#[test]
fn rank2_sweep_entry_point() {
    let out = trimf(&["rank2", "--weights", "4,5,6", "--x", "1,2,3"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["weights"], serde_json::json!([4, 5, 6]));
    assert_eq!(doc["symmetric"], serde_json::json!(false));
    assert!(doc["v"].is_array());
    let out = trimf(&["rank2", "--weights", "2,5,6", "--x", "0,2,3", "--symmetric"]);
    let doc = stdout_json(&out);
    assert_eq!(doc["symmetric"], serde_json::json!(true));
    // out-of-range parameter is a usage error
    let out = trimf(&["rank2", "--weights", "4,5,6", "--x", "3,2,3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn frame_and_specialize() {
    let out = trimf(&["frame", "--weights", "2,3,3", "--bundle", "E2"]);
    let doc = stdout_json(&out);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    let present: usize = entries
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .filter(|e| !e.is_null())
                .count()
        })
        .sum();
    assert_eq!(present, 12);

    let out = trimf(&[
        "specialize",
        "--weights",
        "2,3,3",
        "--bundle",
        "E2",
        "--scalars",
        "0,1,-1",
        "--limit",
        "8",
    ]);
    let doc = stdout_json(&out);
    assert!(doc["classes_found"].as_u64().unwrap() >= 1);
}

#[test]
fn quiver_formats() {
    let out = trimf(&[
        "quiver",
        "--weights",
        "2,3,4",
        "--window",
        "8",
        "--format",
        "dot",
    ]);
    assert!(out.status.success());
    let dot = String::from_utf8_lossy(&out.stdout);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("rank ").count(), 64);

    let out = trimf(&[
        "quiver",
        "--weights",
        "2,3,4",
        "--window",
        "3",
        "--format",
        "json",
    ]);
    let doc = stdout_json(&out);
    assert_eq!(doc["vertices"].as_array().unwrap().len(), 24);

    let out = trimf(&["quiver", "--weights", "2,3,4", "--format", "svg"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suite_over_two_fields() {
    let dir = std::env::temp_dir().join("trimf-cli-verify");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = trimf(&[
        "verify",
        "--fields",
        "q,f3",
        "--jobs",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.matches("PASS").count(), 10, "stderr: {err}");
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], serde_json::json!(true));
    assert_eq!(report["checks"].as_array().unwrap().len(), 10);
    assert_eq!(report["data_sha256"].as_array().unwrap().len(), 6);
}

#[test]
fn deterministic_outputs() {
    let a = trimf(&["mf", "--weights", "2,3,5", "--bundle", "E6ALT"]);
    let b = trimf(&["mf", "--weights", "2,3,5", "--bundle", "E6ALT"]);
    assert_eq!(a.stdout, b.stdout);
    let a = trimf(&[
        "quiver",
        "--weights",
        "2,2,5",
        "--window",
        "4",
        "--format",
        "json",
    ]);
    let b = trimf(&[
        "quiver",
        "--weights",
        "2,2,5",
        "--window",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(a.stdout, b.stdout);
}
