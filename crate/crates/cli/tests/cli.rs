use std::path::PathBuf;
use std::process::Command;

use padic_radii::diffmod::RadiiProfile;
use padic_radii::{Interval, LogValue, PLFun};
use padic_radii_cli::{execute, load_document, Status};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_padic-radii"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("padic-radii-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn golden() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden.json")
}

#[test]
fn dwork_task_output() {
    let doc = load_document(
        r#"{"version": "padic-radii/1", "p": 3,
            "tasks": [{"task": "dwork", "r": [[1, -2]], "interval": [0, 3]}]}"#,
    )
    .unwrap();
    let report = execute(&doc, false);
    assert_eq!(report.tasks[0].status, Status::Ok);
    let csv = report.tasks[0].outputs["profile"].as_str().unwrap();
    let f = PLFun::from_csv(csv, false, false).unwrap();
    let dom = Interval::open(LogValue::zero(), LogValue::from_int(3)).unwrap();
    let expect = PLFun::identity(dom.clone()).max(&PLFun::affine(dom, LogValue::from_int(-1), LogValue::from_int(2))).unwrap();
    assert_eq!(f, expect);
}

#[test]
fn zariski_task_echoes_postconditions() {
    let doc = load_document(r#"{"version": "padic-radii/1", "p": 2, "tasks": [{"task": "zariski", "c": [1, 2], "r": 1}]}"#)
        .unwrap();
    let t = &execute(&doc, false).tasks[0];
    assert_eq!(t.status, Status::Ok);
    let post = &t.outputs["postconditions"];
    for key in ["unimodular", "nonnegative_inverse", "sign_pattern"] {
        assert_eq!(post[key], true, "{key}");
    }
}

#[test]
fn task_errors_are_captured() {
    let doc = load_document(
        r#"{"version": "padic-radii/1", "p": 3, "tasks": [
            {"task": "dwork", "r": [[2, 0]], "interval": [0, 1]},
            {"task": "b1", "u": [[3, [[1, -1, 1]]]], "interval": [0, 1]},
            {"task": "newton", "points": [[0, 0], [1, 1]]}]}"#,
    )
    .unwrap();
    let r = execute(&doc, false);
    assert_eq!(r.tasks.iter().map(|t| t.status).collect::<Vec<_>>(), [Status::Fail, Status::Fail, Status::Ok]);
    assert!(r.tasks[0].diagnostics[0].contains("divisible by p"));
    assert!(r.tasks[1].diagnostics[0].contains("prepared"));
    assert!(!r.all_ok());
}

#[test]
fn check_task_statuses() {
    let doc = load_document(
        r#"{"version": "padic-radii/1", "p": 2, "tasks": [
            {"task": "check", "profile": {"coeffs": [[[0, -2]], [], [[0, 0]]], "interval": [0, 2]},
             "checks": [{"kind": "variation"}, {"kind": "separated", "index": 1, "interval": [[3, 2], 2]}]},
            {"task": "check", "profile": {"dwork": [[0, -1]], "interval": [0, 3]},
             "checks": [{"kind": "robba", "interval": [[1, 2], 1]}]}]}"#,
    )
    .unwrap();
    let r = execute(&doc, true);
    assert_eq!(r.tasks[0].status, Status::Indeterminate, "{:?}", r.tasks[0].outputs);
    assert_eq!(r.tasks[1].status, Status::Fail);
}

#[test]
fn csv_files_reparse_to_report_profiles() {
    let dir = scratch("csv");
    let report = dir.join("report.json");
    let status = bin()
        .args(["run", "--reproducible", "--out"])
        .arg(&report)
        .arg("--csv-dir")
        .arg(dir.join("csv"))
        .arg("--svg-dir")
        .arg(dir.join("svg"))
        .arg(golden())
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.join("csv/01-cyclic-linear-profile.csv")).unwrap();
    let prof = RadiiProfile::from_csv(3, &text).unwrap();
    assert_eq!(prof.to_csv(), text);
    let text = std::fs::read_to_string(dir.join("csv/00-dwork-linear-profile.csv")).unwrap();
    let f = PLFun::from_csv(&text, false, false).unwrap();
    assert_eq!(f.to_csv(), text);
    assert!(std::fs::read_to_string(dir.join("svg/03-b1-path-b1.svg")).unwrap().starts_with("<svg"));
    let json = std::fs::read_to_string(report).unwrap();
    assert!(!json.contains("generated_unix"));
}

#[test]
fn timestamp_unless_reproducible() {
    let out = bin().arg("run").arg(golden()).output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"generated_unix\""));
}

#[test]
fn exit_codes() {
    let dir = scratch("exit");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"version": "padic-radii/1", "p": 3, "tasks": [{"task": "invariants", "weights": [1, [1, 0]]}]}"#)
        .unwrap();
    let out = bin().args(["run"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("tasks[0].weights[1]"));

    let failing = dir.join("failing.json");
    std::fs::write(&failing, r#"{"version": "padic-radii/1", "p": 3, "tasks": [{"task": "dwork", "r": [[2, 0]], "interval": [0, 1]}]}"#)
        .unwrap();
    assert_eq!(bin().args(["run", "--reproducible"]).arg(&failing).output().unwrap().status.code(), Some(1));
    // no check tasks: nothing can fail
    assert_eq!(bin().args(["check", "--reproducible"]).arg(&failing).output().unwrap().status.code(), Some(0));
}
