//! End-to-end checks of the command-line binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nkhodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nkhodge")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn bundled(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models").join(file).display().to_string()
}

fn temp_file(name: &str, text: &str) -> String {
    let path = std::env::temp_dir().join(format!("nkhodge-{}-{name}", std::process::id()));
    std::fs::write(&path, text).expect("temp file");
    path.display().to_string()
}

#[test]
fn verify_bundled_s3s3_passes() {
    let out = nkhodge(&["verify", "--input", &bundled("s3s3.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("λ = 1/3"));
    assert!(text.contains("result: PASS"));
}

#[test]
fn identities_on_flat_model_pass() {
    let out = nkhodge(&["identities", "--model", "flat", "--lambda", "1", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert_eq!(v["model"]["tag"], "flat");
}

#[test]
fn records_follow_the_schema() {
    let out = nkhodge(&["identities", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let records = v["records"].as_array().unwrap();
    assert!(!records.is_empty());
    for r in records {
        let obj = r.as_object().unwrap();
        for key in ["name", "paper_ref", "model", "residual", "pass"] {
            assert!(obj.contains_key(key), "{key} missing in {r}");
        }
        assert!(r["residual"].is_number());
        assert!(r["pass"].is_boolean());
        if let Some(c) = obj.get("fitted_constant") {
            assert!(c.is_string());
        }
    }
    let r = records.iter().find(|r| r["name"] == "laplacian.r_scalar").unwrap();
    assert_eq!(r["fitted_constant"], "1/9");
}

#[test]
fn harmonic_json_carries_betti_and_diamond() {
    let out = nkhodge(&["harmonic", "--mode", "float", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["betti"], serde_json::json!([1, 0, 0, 2, 0, 0, 1]));
    assert_eq!(v["diamond"][2][1], 1);
    assert_eq!(v["diamond"][1][2], 1);
    assert_eq!(v["diamond"][3][0], 0);
    assert_eq!(v["diamond"][0][3], 0);
}

#[test]
fn report_all_is_deterministic_and_refs_are_unique() {
    let args = ["report-all", "--mode", "float", "--format", "json"];
    let a = nkhodge(&args);
    let b = nkhodge(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let mut refs: Vec<&str> = v["records"].as_array().unwrap().iter().map(|r| r["paper_ref"].as_str().unwrap()).collect();
    let n = refs.len();
    refs.sort_unstable();
    refs.dedup();
    assert_eq!(refs.len(), n);
}

#[test]
fn missing_input_is_an_input_error() {
    let out = nkhodge(&["verify", "--input", "/nonexistent/model.json"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_json_is_an_input_error() {
    let path = temp_file("bad.json", "{ not json");
    assert_eq!(code(&nkhodge(&["verify", "--input", &path])), 2);
}

#[test]
fn lambda_requires_flat_model() {
    assert_eq!(code(&nkhodge(&["verify", "--model", "s3s3", "--lambda", "1"])), 2);
}

#[test]
fn nonpositive_tolerance_is_rejected() {
    assert_eq!(code(&nkhodge(&["verify", "--tol", "0"])), 2);
}

#[test]
fn harmonic_on_flat_model_is_an_input_error() {
    assert_eq!(code(&nkhodge(&["harmonic", "--model", "flat"])), 2);
}

#[test]
fn abelian_model_is_not_nearly_kaehler() {
    let out = nkhodge(&["verify", "--model", "abelian", "--format", "json"]);
    assert_eq!(code(&out), 3);
    let v = json(&out);
    assert_eq!(v["exit_code"], 3);
    assert_eq!(v["pass"], false);
}

#[test]
fn jacobi_violation_is_model_invalid() {
    let text = std::fs::read_to_string(bundled("flat_c3.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["structure_constants"] = serde_json::json!([[1, 2, 3, "1"], [2, 1, 3, "1"]]);
    let path = temp_file("jacobi.json", &v.to_string());
    assert_eq!(code(&nkhodge(&["verify", "--input", &path])), 3);
}

#[test]
fn abelian_identities_pass() {
    let out = nkhodge(&["identities", "--model", "abelian", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let names: Vec<&str> = v["records"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.iter().filter(|n| n.starts_with("kahler.")).count() == 4);
}
