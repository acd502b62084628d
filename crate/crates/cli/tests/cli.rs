//! End-to-end runs of the `qbat` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qbat(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbat"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Rows of a CSV file as header-keyed float columns.
fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = read(path);
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

const SHORT: &[&str] = &["--tau-stop", "2", "--tau-count", "5"];

#[test]
fn spectrum_without_saturation_is_linear() {
    let dir = TempDir::new().unwrap();
    let o = qbat(dir.path(), &["spectrum", "--values", "0", "--dim", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&dir.path().join("spectrum.csv"));
    assert_eq!(header, ["n_s", "n", "E_n"]);
    assert_eq!(rows.len(), 8);
    for r in rows {
        assert!((r[2] - 2.0 * r[1]).abs() < 1e-12);
    }
    assert!(dir.path().join("spectrum.config.json").exists());
}

#[test]
fn kerr_column_matches_at_zero_saturation() {
    let dir = TempDir::new().unwrap();
    let o = qbat(
        dir.path(),
        &["spectrum", "--kerr", "--values", "0,0.5", "--dim", "4"],
    );
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&dir.path().join("spectrum.csv"));
    assert_eq!(header, ["n_s", "n", "E_n", "E_n_kerr"]);
    assert_eq!(rows.len(), 8);
    for r in rows.iter().filter(|r| r[0] == 0.0) {
        assert!((r[2] - r[3]).abs() < 1e-12);
    }
}

#[test]
fn empty_time_grid_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run");
    let o = qbat(&out, &["charge", "--tau-count", "0"]);
    assert_eq!(code(&o), 1);
    assert!(!out.exists());
}

#[test]
fn bad_flags_and_unknown_config_keys_exit_one() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&qbat(dir.path(), &["charge", "--bogus"])), 1);
    assert_eq!(code(&qbat(dir.path(), &["charge", "--gamma", "-1"])), 1);
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let o = qbat(dir.path(), &["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn help_exits_zero() {
    let o = Command::new(env!("CARGO_BIN_EXE_qbat"))
        .arg("--help")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "dim = 6\nn_s = 0\nsweep = \"none\"\n").unwrap();
    let path = cfg.to_str().unwrap();
    let o = qbat(dir.path(), &["spectrum", "--config", path]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&dir.path().join("spectrum.csv")).1.len(), 6);
    let o = qbat(dir.path(), &["spectrum", "--config", path, "--dim", "3"]);
    assert_eq!(code(&o), 0);
    assert_eq!(csv_rows(&dir.path().join("spectrum.csv")).1.len(), 3);
}

#[test]
fn charge_writes_trajectories_and_summary() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["charge", "--values", "0,1", "--dim", "12"];
    args.extend_from_slice(SHORT);
    let o = qbat(dir.path(), &args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for stem in ["charge_n_s_0", "charge_n_s_1", "charge_summary"] {
        assert!(dir.path().join(format!("{stem}.csv")).exists(), "{stem}");
        assert!(dir.path().join(format!("{stem}.config.json")).exists());
    }
    let (header, rows) = csv_rows(&dir.path().join("charge_summary.csv"));
    assert_eq!(header, ["n_s", "tau_argmax", "E_max", "ergotropy_max"]);
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r[2] > 0.0 && r[3] <= r[2] + 1e-12);
    }
}

#[test]
fn json_format_writes_arrays_of_objects() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["charge", "--values", "1", "--dim", "8", "--format", "json"];
    args.extend_from_slice(SHORT);
    assert_eq!(code(&qbat(dir.path(), &args)), 0);
    let v: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("charge_summary.json"))).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0]["E_max"].as_f64().unwrap() > 0.0);
}

#[test]
fn maxenergy_has_one_row_per_gamma() {
    let dir = TempDir::new().unwrap();
    let o = qbat(
        dir.path(),
        &[
            "maxenergy",
            "--values",
            "1",
            "--dim",
            "15",
            "--tau-max",
            "10",
        ],
    );
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&dir.path().join("maxenergy.csv"));
    assert_eq!(header, ["n_s", "gamma", "tau_star", "E_max"]);
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r[2] > 0.0 && r[2] <= 10.0 && r[3] > 0.0));
}

#[test]
fn undriven_steady_state_is_empty() {
    let dir = TempDir::new().unwrap();
    let o = qbat(
        dir.path(),
        &["steady", "--values", "0,1", "--dim", "10", "--alpha", "0"],
    );
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&dir.path().join("steady.csv"));
    assert_eq!(
        header,
        [
            "n_s",
            "gamma",
            "E_ss",
            "ergotropy_ss",
            "spectral_gap",
            "residual"
        ]
    );
    for r in rows {
        assert!(r[2].abs() < 1e-10 && r[3].abs() < 1e-10);
        assert!((r[4] - 0.1).abs() < 1e-8);
    }
}

#[test]
fn steady_compare_max_adds_column() {
    let dir = TempDir::new().unwrap();
    let o = qbat(
        dir.path(),
        &["steady", "--values", "1", "--dim", "15", "--compare-max"],
    );
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&dir.path().join("steady.csv"));
    assert_eq!(header.last().unwrap(), "E_max");
    assert!(rows[0][6] >= rows[0][2] - 1e-8);
}

#[test]
fn vacuum_wigner_is_nonnegative() {
    let dir = TempDir::new().unwrap();
    let o = qbat(
        dir.path(),
        &[
            "wigner",
            "--dim",
            "10",
            "--snapshots",
            "0",
            "--re-range=-2:2:9",
            "--im-range=-2:2:9",
        ],
    );
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&dir.path().join("wigner_tau_0.csv"));
    assert_eq!(header, ["re_beta", "im_beta", "W"]);
    assert_eq!(rows.len(), 81);
    let peak = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap()[2];
    assert!((peak - 2.0 / std::f64::consts::PI).abs() < 1e-10);
    let (_, summary) = csv_rows(&dir.path().join("wigner_summary.csv"));
    assert!(summary[0][2] >= -1e-12);
}

#[test]
fn check_flags_tiny_truncation_without_failing() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["check", "--values", "1", "--dim", "2"];
    args.extend_from_slice(SHORT);
    let o = qbat(dir.path(), &args);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("check.json"))).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["points"][0]["truncation"]["pass"], false);
}

#[test]
fn check_passes_a_converged_point() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["check", "--values", "0", "--dim", "8", "--alpha", "0.2"];
    args.extend_from_slice(SHORT);
    assert_eq!(code(&qbat(dir.path(), &args)), 0);
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("check.json"))).unwrap();
    assert_eq!(v["pass"], true, "{v}");
}

#[test]
fn truncation_failures_set_exit_codes() {
    let dir = TempDir::new().unwrap();
    let base = [
        "charge",
        "--truncation-check",
        "--sweep",
        "dim",
        "--tau-stop",
        "10",
        "--tau-count",
        "21",
    ];
    let mut all = base.to_vec();
    all.extend_from_slice(&["--values", "3"]);
    assert_eq!(code(&qbat(&dir.path().join("all"), &all)), 2);

    let mut partial = base.to_vec();
    partial.extend_from_slice(&["--values", "3,50"]);
    let out = dir.path().join("partial");
    assert_eq!(code(&qbat(&out, &partial)), 3);
    let errors: serde_json::Value =
        serde_json::from_str(&read(&out.join("charge_errors.json"))).unwrap();
    assert_eq!(errors.as_array().unwrap().len(), 1);
    assert_eq!(csv_rows(&out.join("charge_summary.csv")).1.len(), 1);
}

#[test]
fn output_is_independent_of_worker_count() {
    let dir = TempDir::new().unwrap();
    let run = |jobs: &str| {
        let out = dir.path().join(jobs);
        let mut args = vec![
            "charge", "--values", "0,0.5,1", "--dim", "10", "--jobs", jobs,
        ];
        args.extend_from_slice(SHORT);
        assert_eq!(code(&qbat(&out, &args)), 0);
        ["charge_summary.csv", "charge_n_s_0.5.csv"].map(|f| read(&out.join(f)))
    };
    assert_eq!(run("1"), run("3"));
}
