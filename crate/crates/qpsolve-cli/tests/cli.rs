//! End-to-end checks of the CLI binary: exit codes, artifact layout,
//! determinism of emitted tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_qpsolve")
}

fn config_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn solve_writes_deterministic_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "solve", "preset": "two-frequency", "n_values": [4, 8]}"#,
    );
    let out1 = tmp.path().join("run1");
    let status = Command::new(bin())
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out1)
        .args(["--dense-check", "--dump-operator"])
        .status()
        .unwrap();
    assert!(status.success());
    let csv1 = fs::read_to_string(out1.join("results.csv")).unwrap();
    assert!(csv1.lines().count() == 3); // header + two rows
    assert!(out1.join("results.jsonl").exists());
    assert!(out1.join("manifest.json").exists());
    assert!(out1.join("operator_n4.qpcs").exists());

    // one raw report per solve, JSON lines
    let reports = fs::read_to_string(out1.join("solve_reports.jsonl")).unwrap();
    assert_eq!(reports.lines().count(), 2);
    assert!(reports.lines().all(|l| l.contains("residual_history")));

    // the dumped operator parses back
    let bytes = fs::read(out1.join("operator_n8.qpcs")).unwrap();
    let dump = qpsolve::qpcs::read_qpcs(bytes.as_slice()).unwrap();
    assert_eq!(dump.dim, 64);
    assert!(!dump.entries.is_empty());

    // a second single-threaded run reproduces the table byte for byte
    let out2 = tmp.path().join("run2");
    let status = Command::new(bin())
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out2)
        .status()
        .unwrap();
    assert!(status.success());
    let csv2 = fs::read_to_string(out2.join("results.csv")).unwrap();
    assert_eq!(csv1, csv2);

    // parse-back reproduces the rows
    let rows = qpsolve::report::parse_csv(&csv1).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].e_n.unwrap() < 1e-13);

    // manifest carries the config hash
    let manifest = fs::read_to_string(out1.join("manifest.json")).unwrap();
    assert!(manifest.contains("config_sha256"));
    assert!(manifest.contains("\"threads\": 1"));
}

#[test]
fn refuses_to_overwrite_without_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "solve", "preset": "two-frequency", "n_values": [4]}"#,
    );
    let out = tmp.path().join("out");
    let run = |extra: &[&str]| {
        Command::new(bin())
            .args(["solve", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(extra)
            .status()
            .unwrap()
    };
    assert!(run(&[]).success());
    let second = run(&[]);
    assert_eq!(second.code(), Some(2));
    assert!(run(&["--overwrite"]).success());
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    // empty N list
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "solve", "preset": "two-frequency", "n_values": []}"#,
    );
    let status = Command::new(bin())
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // kind mismatch with the subcommand
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "condition", "preset": "two-frequency", "n_values": [4]}"#,
    );
    let status = Command::new(bin())
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out2"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "solve", "preset": "two-frequency", "n_values": [8], "max_iter": 2}"#,
    );
    let status = Command::new(bin())
        .args(["solve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn condition_subcommand_reports_both_numbers() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let status = Command::new(bin())
        .args(["condition", "--config"])
        .arg(config_dir().join("condition.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let rows =
        qpsolve::report::parse_csv(&fs::read_to_string(out.join("results.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!(row.cond_q.unwrap() > 1.0);
        assert!(row.cond_qm.unwrap() >= 1.0);
        assert!(row.cond_qm.unwrap() < row.cond_q.unwrap());
    }
}

#[test]
fn pam_compare_emits_side_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{"kind": "pam-compare", "preset": "two-frequency-1d",
            "n_values": [8], "l_values": [5, 5, 12]}"#,
    );
    let out = tmp.path().join("out");
    let status = Command::new(bin())
        .args(["pam-compare", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let dio = qpsolve::report::parse_csv(
        &fs::read_to_string(out.join("pam_diophantine.csv")).unwrap(),
    )
    .unwrap();
    // duplicate L deduplicated
    assert_eq!(dio.len(), 2);
    assert_eq!(dio[0].l, Some(5));
    assert_eq!(dio[0].rational.as_deref(), Some("7/5"));
    assert!((dio[0].diophantine_error.unwrap() - 7.11e-2).abs() < 1e-3);
}
