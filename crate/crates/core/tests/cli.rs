//! End-to-end checks of the qclab binary: exit codes, diagnostics, and the
//! byte-identical determinism contract.

use std::path::Path;
use std::process::{Command, Output};

fn qclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn repo_file(rel: &str) -> String {
    // Integration tests run from the crate root two levels down.
    let here = Path::new(env!("CARGO_MANIFEST_DIR"));
    here.join("../..").join(rel).to_string_lossy().into_owned()
}

#[test]
fn validate_accepts_the_reference_spec() {
    let out = qclab(&["model", "validate", &repo_file("specs/two_piece.json")]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"valid\": true"));
    assert!(text.contains("wall_gap"));
}

#[test]
fn validate_rejects_bad_spec_with_exit_1() {
    let out = qclab(&["model", "validate", &repo_file("specs/invalid_betti.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Betti"), "stderr: {err}");
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = qclab(&["model", "validate", "/nonexistent/spec.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn same_seed_gives_byte_identical_reports() {
    let args = ["paths", "sample", "--samples", "40", "--seed", "11", "--format", "csv"];
    let a = qclab(&args);
    let b = qclab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = qclab(&["paths", "sample", "--samples", "40", "--seed", "12", "--format", "csv"]);
    assert_ne!(a.stdout, c.stdout, "different seeds should differ");
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["paths", "qgfit", "--samples", "30", "--seed", "4"];
    let a = Command::new(env!("CARGO_BIN_EXE_qclab"))
        .args(args)
        .env("QCLAB_THREADS", "1")
        .output()
        .unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_qclab"))
        .args(args)
        .env("QCLAB_THREADS", "4")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn abc_analyze_matches_expected_shape() {
    let out = qclab(&["abc", "analyze", "2 1 1 1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["periodic_order"], serde_json::Value::Null);
    assert_eq!(v["exists_finite_height"], serde_json::json!(true));
    assert_eq!(v["routes_agree"], serde_json::json!(true));
}

#[test]
fn orbit_qi_vertex_generator_exits_2_with_witness() {
    let out = qclab(&["orbit", "qi", "--gen", "v0: a", "--radius", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["bounded_orbit"], serde_json::json!(true));
}

#[test]
fn slide_audit_passes_on_the_reference_spec() {
    let out = qclab(&["slide", "audit", "--samples", "60", "--seed", "2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["violations"], serde_json::json!(0));
}

#[test]
fn plane_control_exits_2_with_witness() {
    let out = qclab(&[
        "contract", "test", "--plane", "--samples", "80", "--seed", "3", "--constant", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["witness"].is_object());
}

#[test]
fn self_glued_spec_loads_and_classifies() {
    let out = qclab(&[
        "morse",
        "classify",
        "t0",
        "--spec",
        &repo_file("specs/self_glued.json"),
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["translation_length"], serde_json::json!(1));
    assert_eq!(v["morse"], serde_json::json!(true));
}
