//! End-to-end tests of the `bcn` binary: exit codes, report shapes, and
//! reproducibility, driven through the real argument parser.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bcn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_str()
        .expect("fixture path is valid UTF-8")
        .to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SCHEDULE: &str = "3,2,3,2,3,2,2,3,1,3,2,1,1";

#[test]
fn simulate_reproduces_a_recorded_trace() {
    let out = bcn(&[
        "simulate",
        &fixture("model_7state.json"),
        "--x0",
        "1",
        "--inputs",
        SCHEDULE,
    ]);
    assert!(out.status.success());
    let produced = stdout_json(&out);
    let recorded: Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("trace_7state.json")).unwrap())
            .unwrap();
    assert_eq!(produced, recorded);
}

#[test]
fn simulate_with_a_seed_is_reproducible() {
    let args = [
        "simulate",
        &fixture("model_6state.json"),
        "--x0",
        "3",
        "--random",
        "25",
        "--seed",
        "9",
    ];
    let first = bcn(&args);
    let second = bcn(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let trace = stdout_json(&first);
    let exp = &trace["experiments"][0];
    assert_eq!(exp["x"].as_array().unwrap().len(), 26);
    assert_eq!(exp["u"].as_array().unwrap().len(), 25);
    // The six-state model has two outputs, so y is recorded.
    assert_eq!(exp["y"].as_array().unwrap().len(), 25);

    let other = bcn(&[
        "simulate",
        &fixture("model_6state.json"),
        "--x0",
        "3",
        "--random",
        "25",
        "--seed",
        "10",
    ]);
    assert_ne!(first.stdout, other.stdout);
}

#[test]
fn analyze_identifiability_reports_the_knowledge_mask() {
    let out = bcn(&["analyze", &fixture("trace_7state.json"), "identifiability"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["informative"], Value::Bool(false));
    assert_eq!(report["known_columns"], 11);
    assert_eq!(report["total_columns"], 21);
    assert_eq!(report["free_columns"].as_array().unwrap().len(), 10);
}

#[test]
fn identify_recovers_an_informative_dataset() {
    // Two states, one input, both transition columns observed.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("full.json");
    std::fs::write(
        &path,
        r#"{"N":2,"M":1,"P":1,"experiments":[{"x":[1,2,1],"u":[1,1]}]}"#,
    )
    .unwrap();
    let out = bcn(&["analyze", path.to_str().unwrap(), "identify"]);
    assert!(out.status.success());
    let model = stdout_json(&out);
    assert_eq!(model["L"], serde_json::json!([2, 1]));
    assert_eq!(model["H"], serde_json::json!([1, 1]));
}

#[test]
fn exit_codes_follow_the_contract() {
    // 1: the data answer the question in the negative.
    let not_informative = bcn(&["analyze", &fixture("trace_6state.json"), "identify"]);
    assert_eq!(not_informative.status.code(), Some(1));
    assert!(!not_informative.stderr.is_empty());

    let unsolvable_safe = bcn(&[
        "synthesize",
        &fixture("trace_7state.json"),
        "safe",
        "--unsafe",
        "5",
    ]);
    assert_eq!(unsolvable_safe.status.code(), Some(1));

    let unsolvable_regulation = bcn(&[
        "synthesize",
        &fixture("trace_6state.json"),
        "regulate",
        "--ystar",
        "1",
    ]);
    assert_eq!(unsolvable_regulation.status.code(), Some(1));

    // 2: the input itself is bad.
    let missing_file = bcn(&["analyze", "no-such-trace.json", "equilibria"]);
    assert_eq!(missing_file.status.code(), Some(2));

    let bad_state = bcn(&[
        "analyze",
        &fixture("trace_7state.json"),
        "basin",
        "--target",
        "9",
    ]);
    assert_eq!(bad_state.status.code(), Some(2));

    let empty_safe_set = bcn(&[
        "synthesize",
        &fixture("trace_7state.json"),
        "safe",
        "--unsafe",
        "1,2,3,4,5,6,7",
    ]);
    assert_eq!(empty_safe_set.status.code(), Some(2));

    // 0: solvable, and verification (when requested) passes.
    let verified = bcn(&[
        "synthesize",
        &fixture("trace_7state.json"),
        "safe",
        "--unsafe",
        "3,4,7",
        "--verify",
        "300",
        "--seed",
        "5",
    ]);
    assert_eq!(verified.status.code(), Some(0));
    let report = stdout_json(&verified);
    assert_eq!(report["verdict"]["pass"], Value::Bool(true));
    assert_eq!(report["verdict"]["seed"], 5);
    assert_eq!(report["K"], serde_json::json!([2, 1, 1, 3, 3, 2, 3]));
}

#[test]
fn unsolvable_reports_keep_their_certificates() {
    let out = bcn(&[
        "synthesize",
        &fixture("trace_7state.json"),
        "safe",
        "--unsafe",
        "2,3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = stdout_json(&out);
    assert_eq!(report["solvable"], Value::Bool(false));
    assert_eq!(report["K"], Value::Null);
    assert_eq!(report["missing_stay"], serde_json::json!([4]));
    assert_eq!(report["unreachable"], serde_json::json!([2, 3]));
}

#[test]
fn regulation_report_names_the_cycle_assignment() {
    let out = bcn(&[
        "synthesize",
        &fixture("trace_6state.json"),
        "regulate",
        "--ystar",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["solvable"], Value::Bool(true));
    assert_eq!(report["K"], serde_json::json!([1, 1, 1, 2, 3, 2]));
    assert_eq!(report["target_states"], serde_json::json!([2, 3, 4]));
    assert_eq!(report["cycles"]["cycles"].as_array().unwrap().len(), 2);
    assert_eq!(report["chosen_cycle"]["2"], 0);
    assert_eq!(report["chosen_cycle"]["3"], 1);
}

#[test]
fn cycles_with_no_matching_states_is_an_empty_report() {
    // Output 2 exists in the alphabet but is never observed.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mono.json");
    std::fs::write(
        &path,
        r#"{"N":3,"M":1,"P":2,"experiments":[{"x":[1,2,1],"u":[1,1],"y":[1,1]}]}"#,
    )
    .unwrap();
    let out = bcn(&["analyze", path.to_str().unwrap(), "cycles", "--ystar", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["target_states"], serde_json::json!([]));
    assert_eq!(report["cycles"], serde_json::json!([]));
}

#[test]
fn human_format_marks_unobserved_columns() {
    let out = bcn(&[
        "analyze",
        &fixture("trace_7state.json"),
        "identifiability",
        "--format",
        "human",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("identifiable: no"));
    assert!(text.contains("input 1: [4, 2, 2, *, *, *, *]"));
    assert!(text.contains("input 2: [6, *, 3, *, *, 5, 7]"));
    assert!(text.contains("input 3: [7, *, *, 3, 1, *, 6]"));
}

#[test]
fn human_format_spells_out_cycles() {
    let out = bcn(&[
        "analyze",
        &fixture("trace_6state.json"),
        "cycles",
        "--ystar",
        "2",
        "--format",
        "human",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2 -(1)-> 4 -(2)-> 2"));
    assert!(text.contains("3 -(1)-> 3"));
}

#[test]
fn out_flag_redirects_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = bcn(&[
        "analyze",
        &fixture("trace_7state.json"),
        "equilibria",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["equilibria"].as_array().unwrap().len(), 3);
}
