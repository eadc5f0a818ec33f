#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn bellsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellsym"))
        .args(args)
        .output()
        .expect("failed to spawn bellsym")
}

pub fn stdout_of(args: &[&str]) -> String {
    let out = bellsym(args);
    assert!(
        out.status.success(),
        "bellsym {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

pub fn json_of(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&stdout_of(args)).expect("valid JSON output")
}

/// Parses CSV output into its header and numeric rows.
pub fn csv_of(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = stdout_of(args);
    let mut lines = text.lines();
    let header = lines
        .next()
        .expect("header")
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().expect("number")).collect())
        .collect();
    (header, rows)
}

pub fn schema_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas/v1")
        .join(format!("{name}.schema.json"))
}

pub fn assert_schema(name: &str, doc: &serde_json::Value) {
    let text = std::fs::read_to_string(schema_path(name)).expect("schema file");
    let schema: serde_json::Value = serde_json::from_str(&text).expect("schema JSON");
    let validator = jsonschema::validator_for(&schema).expect("valid schema");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name} schema violations: {errors:?}");
}
