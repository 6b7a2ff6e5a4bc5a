//! The `speclab` binary: outputs and exit codes.

use std::process::Command;

fn speclab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_speclab"))
}

#[test]
fn spectrum_csv_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("sq");
    let out = speclab()
        .args([
            "spectrum", "--domain", "square", "--h", "1/32", "--k", "3", "--format", "csv", "--out",
        ])
        .arg(&prefix)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("index,eigenvalue,residual"));
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("sq.json").exists());
    assert!(dir.path().join("sq.csv").exists());
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["spectrum", "--domain", "square", "--h", "0"],
        vec!["spectrum", "--domain", "hexagon", "--h", "1/8"],
        vec!["spectrum", "--domain", "square"],
        vec!["convergence", "--domain", "square", "--h", "1/8,1/16"],
        vec!["bogus"],
    ] {
        let out = speclab().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn check_passes_on_square() {
    let out = speclab()
        .args(["check", "--domain", "square", "--h", "1/32", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["dichotomies"].as_array().unwrap().len(), 4);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"domain":{"kind":"disk","radius":1.0},"h":0.0625,"k":4}"#).unwrap();
    let out = speclab()
        .args(["spectrum", "--format", "json", "--k", "2", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["spectrum"]["eigenvalues"].as_array().unwrap().len(), 2);
}

#[test]
fn identities_and_oracle() {
    let out = speclab().args(["identities", "--trials", "200"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);

    let out = speclab()
        .args(["oracle", "--domain", "disk", "--k", "3", "--format", "csv"])
        .output()
        .unwrap();
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.contains("1,5.78318596"));
    let out = speclab().args(["oracle", "--domain", "lshape"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
