use std::path::Path;
use std::process::{Command, Output};

fn scuc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scuc"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).unwrap()
}

#[test]
fn det_solve_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = scuc(
        dir.path(),
        &["solve", "--mode", "det", "--case", "six_bus.case"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&std::fs::read(dir.path().join("det_report.json")).unwrap());
    assert!(report["iterations"].as_u64().unwrap() >= 1);
    assert!(report.get("wall_time_s").is_none());
    let csv = std::fs::read_to_string(dir.path().join("det_schedule.csv")).unwrap();
    assert!(csv.lines().count() > 1);
}

#[test]
fn unknown_flag_prints_usage() {
    let dir = tempfile::tempdir().unwrap();
    let out = scuc(dir.path(), &["solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));

    let out = scuc(dir.path(), &["--error-json", "solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let err = json(&out.stderr);
    assert_eq!(err["error"], "usage");
    assert_eq!(err["exit_code"], 1);
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = scuc(
        dir.path(),
        &[
            "--error-json",
            "solve",
            "--mode",
            "det",
            "--case",
            "missing.case",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out.stderr)["error"], "input");

    let out = scuc(
        dir.path(),
        &[
            "solve",
            "--mode",
            "det",
            "--case",
            "tiny2",
            "--n-samples",
            "0",
        ],
    );
    assert_eq!(out.status.code(), Some(1));

    scuc(dir.path(), &["gen-case", "--name", "tiny2"]);
    let path = dir.path().join("tiny2.case");
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replace("\"p_min\": 20.0", "\"p_min\": 500.0");
    std::fs::write(&path, text).unwrap();
    let out = scuc(
        dir.path(),
        &[
            "--error-json",
            "solve",
            "--mode",
            "det",
            "--case",
            "tiny2.case",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = json(&out.stderr);
    assert_eq!(err["error"], "model");
    assert!(err["message"].as_str().unwrap().contains("p_min"));
}

#[test]
fn infeasible_case_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    scuc(dir.path(), &["gen-case", "--name", "tiny2"]);
    let path = dir.path().join("tiny2.case");
    let text = std::fs::read_to_string(&path)
        .unwrap()
        .replace("\"flow_limit\": 100.0", "\"flow_limit\": 1.0");
    std::fs::write(&path, text).unwrap();
    let out = scuc(
        dir.path(),
        &[
            "--error-json",
            "solve",
            "--mode",
            "det",
            "--case",
            "tiny2.case",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let err = json(&out.stderr);
    assert_eq!(err["error"], "solver");
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn evaluate_rejects_mismatched_schedule() {
    let dir = tempfile::tempdir().unwrap();
    assert!(
        scuc(dir.path(), &["solve", "--mode", "det", "--case", "tiny2"])
            .status
            .success()
    );
    let out = scuc(
        dir.path(),
        &[
            "evaluate",
            "--case",
            "six_bus",
            "--schedule",
            "det_schedule.csv",
            "--n-samples",
            "100",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
