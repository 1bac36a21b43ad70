use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superhol"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(file: &str) -> (i32, Value) {
    let out = run(&["run", data(file).to_str().unwrap()]);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

#[test]
fn bundled_problems_pass() {
    for file in ["odd_line.json", "zero_connection.json", "gl11.json", "walker.json", "cosp22_prolongation.json", "sl12_pi_adjoint.json"] {
        let (code, json) = report(file);
        assert_eq!(code, 0, "{file}: {json}");
        assert_eq!(json["ok"], Value::Bool(true), "{file}");
    }
}

#[test]
fn odd_line_report_content() {
    let (_, json) = report("odd_line.json");
    assert_eq!(json["results"]["holonomy"]["dim"]["p"], 1);
    assert_eq!(json["results"]["holonomy"]["dim"]["q"], 0);
    assert_eq!(json["results"]["flat"], false);
    assert_eq!(json["input"]["name"], "odd line");
}

#[test]
fn failed_expectation_exits_one() {
    let (code, json) = report("wrong_expectation.json");
    assert_eq!(code, 1);
    assert_eq!(json["assertions"][0]["pass"], false);
}

#[test]
fn schema_error_exits_two_with_pointer() {
    let out = run(&["run", data("bad_schema.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/options/cap"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn out_file_is_byte_identical_across_runs() {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let (a, b) = (dir.join("odd_a.json"), dir.join("odd_b.json"));
    for p in [&a, &b] {
        let out = run(&["run", data("odd_line.json").to_str().unwrap(), "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn cap_order_flag_overrides_problem() {
    let out = run(&["run", data("walker.json").to_str().unwrap(), "--cap-order", "0"]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["results"]["holonomy"]["cap_order"], 0);
    assert_eq!(json["status"]["capped"], true);
    assert_eq!(json["status"]["certified"], false);
}

#[test]
fn steps_flag_enables_transport() {
    let out = run(&["run", data("zero_connection.json").to_str().unwrap(), "--steps", "10"]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["results"]["transport"]["status"], "numeric");
    let out = run(&["run", data("zero_connection.json").to_str().unwrap()]);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["results"].get("transport").is_none());
}

#[test]
fn out_with_several_files_is_rejected() {
    let f = data("gl11.json");
    let out = run(&["run", f.to_str().unwrap(), f.to_str().unwrap(), "--out", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tables_command() {
    let out = run(&["tables", "gl", "--max-dim", "2"]);
    assert!(out.status.success());
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = json["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["algebra"].as_str().unwrap()).collect();
    assert_eq!(names, ["gl(1|0)", "gl(0|1)", "gl(2|0)", "gl(1|1)", "gl(0|2)"]);
    assert_eq!(rows[0]["is_berger"], false);
    assert_eq!(rows[3]["is_berger"], true);
    assert!(!run(&["tables", "so"]).status.success());
}

#[test]
fn selftest_command() {
    let out = run(&["selftest"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["failed"], 0);
    let out = run(&["selftest", "--mutate"]);
    assert!(!out.status.success());
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    let case = json["cases"].as_array().unwrap().iter().find(|c| c["name"] == "supercommutativity").unwrap();
    assert_eq!(case["pass"], false);
}
