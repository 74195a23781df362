//! Command-line behavior: exit codes, determinism, output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

fn octa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octa"))
        .args(args)
        .output()
        .unwrap()
}

fn write_height(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn eval_surface_point_is_the_face_variable() {
    let out = octa(&["eval", "--apex", "0", "0", "0"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "x[0,0]");
}

#[test]
fn bad_parity_apex_exits_two() {
    let out = octa(&["eval", "--apex", "2", "1", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
}

#[test]
fn below_surface_exits_two() {
    let out = octa(&["eval", "--apex", "-2", "0", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_height_exits_two() {
    let path = write_height("octa-cli-bad.json", r#"{"base":"nonesuch"}"#);
    let out = octa(&["eval", "--height", path.to_str().unwrap(), "--apex", "1", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let path = write_height("octa-cli-bad2.json", r#"{"base":"aztec","overrides":[[0,0,2]]}"#);
    let out = octa(&["count", "--height", path.to_str().unwrap(), "--apex", "1", "0", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn identical_jobs_produce_identical_bytes() {
    let fortress = write_height("octa-cli-fortress.json", r#"{"base":"fortress"}"#);
    let args = [
        "sample",
        "--height",
        fortress.to_str().unwrap(),
        "--apex",
        "2",
        "0",
        "0",
        "--seed",
        "42",
        "--count",
        "5",
    ];
    let a = octa(&args);
    let b = octa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(json["samples"].as_array().unwrap().len(), 5);
}

#[test]
fn count_methods_agree() {
    for method in ["recurrence", "enumerate", "both"] {
        let out = octa(&["count", "--apex", "3", "0", "1", "--method", method]);
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "64");
    }
}

#[test]
fn enumerate_json_and_cap() {
    let out = octa(&["enumerate", "--apex", "2", "0", "0"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["count"], serde_json::json!(8));

    // The environment cap turns large enumerations into input errors.
    let out = Command::new(env!("CARGO_BIN_EXE_octa"))
        .args(["enumerate", "--apex", "3", "0", "1"])
        .env("OCTA_MAX_MATCHINGS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn graph_formats_are_valid() {
    let out = octa(&["graph", "--apex", "3", "1", "0", "--format", "svg", "--labels"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(octa_core::render::svg_is_well_formed(&svg));

    let out = octa(&["graph", "--apex", "3", "1", "0", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["apex"], serde_json::json!([3, 1, 0]));

    let out = octa(&["graph", "--apex", "3", "1", "0", "--format", "dot"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("graph octa {"));
}

#[test]
fn somos_prints_the_sequence() {
    let out = octa(&["somos", "--k", "5", "--a", "1", "--b", "2", "--n", "10"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "1 1 1 1 1 2 3 5 11 37"
    );
}

#[test]
fn verify_small_suite_exits_zero() {
    let out = octa(&["verify", "counting"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_main_theorem_with_family_filter() {
    let out = octa(&[
        "verify",
        "main-theorem",
        "--family",
        "aztec",
        "--max-cone",
        "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("main-theorem:"));
    assert!(!text.contains("fortress"));
}

#[test]
fn fortress_count_from_file() {
    let fortress = write_height("octa-cli-fortress-count.json", r#"{"base":"fortress"}"#);
    let out = octa(&[
        "count",
        "--height",
        fortress.to_str().unwrap(),
        "--apex",
        "2",
        "0",
        "0",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "5");
}

#[test]
fn unknown_suite_exits_two() {
    let out = octa(&["verify", "nonesuch"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_svg_renders_overlay() {
    let out = octa(&[
        "sample", "--apex", "2", "0", "0", "--seed", "7", "--format", "svg",
    ]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(octa_core::render::svg_is_well_formed(&svg));
    assert!(svg.contains("#c0392b"));
}

#[test]
fn output_flag_writes_the_file() {
    let target = std::env::temp_dir().join("octa-cli-out.txt");
    let _ = std::fs::remove_file(&target);
    let out = octa(&[
        "somos",
        "--k",
        "4",
        "--a",
        "1",
        "--b",
        "2",
        "--n",
        "6",
        "--output",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&target).unwrap().trim(), "1 1 1 1 2 3");
}
