//! Black-box tests of the varseg binary: exit codes, stage-tagged
//! diagnostics, and output conventions.

use std::path::Path;
use std::process::{Command, Output};

fn varseg(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varseg"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn varseg")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn missing_input_fails_with_parse_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let output = varseg(
        &[
            "analyze",
            "nope.csv",
            "--indicator",
            "duration",
            "--buckets",
            "10",
            "--windows",
            "1,2",
            "--segment-window",
            "2",
            "--theta",
            "0.1",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("parse"));
}

#[test]
fn bad_segment_window_fails_with_config_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let gen = varseg(
        &["generate", "step", "--regions", "A:20", "--out", "log.csv"],
        tmp.path(),
    );
    assert!(gen.status.success());
    let output = varseg(
        &[
            "analyze",
            "log.csv",
            "--indicator",
            "attribute:idx",
            "--buckets",
            "10",
            "--windows",
            "1,2",
            "--segment-window",
            "5",
            "--theta",
            "0.1",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("config"));
}

#[test]
fn theta_out_of_range_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    varseg(
        &["generate", "step", "--regions", "A:20", "--out", "log.csv"],
        tmp.path(),
    );
    let output = varseg(
        &[
            "analyze",
            "log.csv",
            "--indicator",
            "attribute:idx",
            "--buckets",
            "10",
            "--windows",
            "1",
            "--segment-window",
            "1",
            "--theta",
            "1.5",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert!(!output.status.success());
    assert!(stderr_of(&output).contains("theta"));
}

#[test]
fn emd_prints_six_decimals() {
    let tmp = tempfile::tempdir().unwrap();
    varseg(
        &["generate", "step", "--regions", "A:10", "--out", "a.csv"],
        tmp.path(),
    );
    varseg(
        &["generate", "step", "--regions", "B:10", "--out", "b.csv"],
        tmp.path(),
    );
    let same = varseg(&["emd", "--log-a", "a.csv", "--log-b", "a.csv"], tmp.path());
    assert!(same.status.success());
    assert_eq!(String::from_utf8_lossy(&same.stdout), "0.000000\n");

    let different = varseg(&["emd", "--log-a", "a.csv", "--log-b", "b.csv"], tmp.path());
    assert!(different.status.success());
    assert_eq!(String::from_utf8_lossy(&different.stdout), "1.000000\n");
}

#[test]
fn log_level_env_var_emits_timings() {
    let tmp = tempfile::tempdir().unwrap();
    varseg(
        &[
            "generate",
            "step",
            "--regions",
            "A:30,B:30",
            "--out",
            "log.csv",
        ],
        tmp.path(),
    );
    let output = Command::new(env!("CARGO_BIN_EXE_varseg"))
        .args([
            "analyze",
            "log.csv",
            "--indicator",
            "attribute:idx",
            "--buckets",
            "12",
            "--windows",
            "1",
            "--segment-window",
            "1",
            "--theta",
            "0.1",
            "--out",
            "out",
        ])
        .env("VS_LOG_LEVEL", "info")
        .current_dir(tmp.path())
        .output()
        .expect("spawn varseg");
    assert!(output.status.success());
    let diagnostics = stderr_of(&output);
    assert!(
        diagnostics.contains("total"),
        "no timing line in: {diagnostics}"
    );
}

#[test]
fn segment_export_uses_report_config() {
    let tmp = tempfile::tempdir().unwrap();
    varseg(
        &[
            "generate",
            "step",
            "--regions",
            "A:20,B:10",
            "--out",
            "log.csv",
        ],
        tmp.path(),
    );
    let analyze = varseg(
        &[
            "analyze",
            "log.csv",
            "--indicator",
            "attribute:idx",
            "--buckets",
            "6",
            "--windows",
            "1",
            "--segment-window",
            "1",
            "--theta",
            "0.1",
            "--out",
            "out",
        ],
        tmp.path(),
    );
    assert!(analyze.status.success());

    let export = varseg(
        &[
            "segment-export",
            "--report",
            "out/report.json",
            "--out",
            "again",
        ],
        tmp.path(),
    );
    assert!(export.status.success(), "{}", stderr_of(&export));
    assert!(tmp.path().join("again/manifest.json").exists());

    let original: Vec<String> = std::fs::read_dir(tmp.path().join("out"))
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().to_string_lossy().into_owned();
            name.starts_with("segment_").then_some(name)
        })
        .collect();
    for name in original {
        let a = std::fs::read(tmp.path().join("out").join(&name)).unwrap();
        let b = std::fs::read(tmp.path().join("again").join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between analyze and segment-export");
    }
}
