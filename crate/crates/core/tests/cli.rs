use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::NamedTempFile;

fn pou(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pou"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn file(contents: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

fn path(f: &NamedTempFile) -> &str {
    f.path().to_str().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn derive_from_file() {
    let input = file(r#"{"a":"1/2","b":"1/3","c":"1/6"}"#);
    let out = pou(&["derive", path(&input)], "");
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["kind"], "derived_vector");
    let expected: Value = serde_json::from_str(
        r#"[{"key":["a"],"weight":"1/6"},
            {"key":["a","b"],"weight":"1/3"},
            {"key":["a","b","c"],"weight":"1/2"}]"#,
    )
    .unwrap();
    assert_eq!(doc["payload"], expected);
}

#[test]
fn derive_then_integrate_through_pipes() {
    let derived = pou(&["derive"], r#"{"x":"3/4","y":"1/4"}"#);
    let back = pou(&["integrate"], std::str::from_utf8(&derived.stdout).unwrap());
    assert_eq!(back.status.code(), Some(0));
    assert_eq!(json(&back)["payload"], serde_json::json!({"x": "3/4", "y": "1/4"}));
}

#[test]
fn zero_iterations_echo_canonically() {
    let input = file(r#"{"facets":[["c","b"],["b","a"],["b"]],"vertices":["c","a","b"]}"#);
    let out = pou(&["subdivide", "--iterations", "0", path(&input)], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json(&out)["payload"],
        serde_json::json!({"vertices": ["a", "b", "c"], "facets": [["a", "b"], ["b", "c"]]})
    );
}

#[test]
fn roundtrip_suite_report() {
    let out = pou(&["check", "--suite", "roundtrip", "--seed", "7", "--cases", "1000"], "");
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["kind"], "report");
    assert_eq!(doc["payload"]["passed"], 1000);
    assert_eq!(doc["payload"]["failed"], 0);
}

#[test]
fn domain_error_exits_one() {
    let out = pou(&["derive"], r#"{"a":"1/2","b":"1/3"}"#);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["kind"], "error");
    assert_eq!(doc["payload"]["precondition"], "weights_sum_to_one");
}

#[test]
fn join_alpha_out_of_range() {
    let left = file(r#"{"a":"1"}"#);
    let out = pou(&["join", "--alpha", "3/2", "--left", path(&left)], "");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["kind"], "error");
}

#[test]
fn malformed_input_exits_two() {
    for input in ["{a", r#"{"a":0.5,"b":0.5}"#, "[1, 2]"] {
        let out = pou(&["derive"], input);
        assert_eq!(out.status.code(), Some(2), "input {input}");
        assert_eq!(json(&out)["kind"], "error");
    }
}

#[test]
fn precision_flag_is_rejected() {
    let out = pou(&["--precision", "10", "derive"], r#"{"a":"1"}"#);
    assert_eq!(out.status.code(), Some(2));
    let out = pou(&["derive", "--precision", "10"], r#"{"a":"1"}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_exits_two() {
    assert_eq!(pou(&["integral"], "").status.code(), Some(2));
}

#[test]
fn cech_reruns_are_byte_identical() {
    let sample = file(r#"{"points":["b0","b1","b2"],"coordinates":[["0"],["1"],["2"]]}"#);
    let args = ["cech", "--radius", "3/2", path(&sample)];
    let first = pou(&args, "");
    let second = pou(&args, "");
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let doc = json(&first);
    assert_eq!(doc["payload"]["nerve"]["facets"], serde_json::json!([["b0", "b1", "b2"]]));
}

#[test]
fn cover_pou_and_nerve() {
    let sample = file(r#"{"points":["p","q"],"distances":[["0","1"],["1","0"]]}"#);
    let cover = file(r#"{"U1":["p","q"],"U2":["q"]}"#);
    let out = pou(&["cover-pou", path(&sample), path(&cover)], "");
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(
        doc["payload"],
        serde_json::json!([{"U1": "1"}, {"U1": "2/3", "U2": "1/3"}])
    );
    let nerve = pou(&["nerve"], std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(json(&nerve)["payload"]["facets"], serde_json::json!([["U1", "U2"]]));
}

#[test]
fn realize_with_coordinates_file() {
    let coords = file(r#"{"coordinates":{"a":["0","0"],"b":["2","0"],"c":["0","2"]}}"#);
    let out = pou(&["realize", "--coords", path(&coords)], r#"{"a":"1/2","b":"1/4","c":"1/4"}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["payload"], serde_json::json!(["1/2", "1/2"]));
}

#[test]
fn missing_file_is_malformed() {
    let out = pou(&["derive", "/nonexistent/input.json"], "");
    assert!(!Path::new("/nonexistent/input.json").exists());
    assert_eq!(out.status.code(), Some(2));
}
