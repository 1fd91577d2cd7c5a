//! End-to-end checks of the `sfwm` binary: exit codes, JSON report fields,
//! CSV/PGM structure, and byte-level determinism of reruns.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

/// Short fiber on a narrow window: cheap grids for format checks. The
/// copolarized stripes fall outside this window, so only the cross process
/// is usable here.
const NARROW: &str = r#"{
  "fiber": { "length_m": 0.002 },
  "grid": { "window_nm": [1548.0, 1552.0], "points": 64 }
}"#;

/// Worked-example design on the full window at reduced resolution. Norms on
/// a grid this coarse are biased, so tests against it assert structure and
/// ordering rather than converged values.
const FULL_COARSE: &str = r#"{
  "grid": { "window_nm": [1535.0, 1565.0], "points": 128 }
}"#;

fn sfwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfwm"))
        .args(args)
        .output()
        .expect("spawn sfwm")
}

fn ok_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

fn failure_stderr(out: &Output) -> String {
    assert!(!out.status.success(), "expected a nonzero exit");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn field(value: &Value, key: &str) -> f64 {
    value[key].as_f64().unwrap_or_else(|| panic!("missing numeric field {key}"))
}

fn parse_csv(path: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .skip(1)
                .map(|cell| cell.parse::<f64>().unwrap())
                .collect()
        })
        .collect()
}

#[test]
fn phasematch_reports_the_worked_pump_placement() {
    let out = sfwm(&["phasematch"]);
    let v = ok_json(&out);
    assert_eq!(field(&v, "lambda_degenerate_nm"), 1550.0);
    assert!((field(&v, "lambda_pump_x_nm") - 1544.99).abs() < 0.3);
    assert!((field(&v, "lambda_pump_y_nm") - 1555.04).abs() < 0.3);
    assert!((field(&v, "parasitic_partner_x_nm") - 1540.02).abs() < 0.3);
    assert!((field(&v, "parasitic_partner_y_nm") - 1560.11).abs() < 0.3);
    assert!((field(&v, "pump_detuning_rad_s") - 3.94e12).abs() < 0.05e12);
    assert!(field(&v, "residual_mismatch_rad_m").abs() < 1e-6);
}

#[test]
fn phasematch_fails_without_birefringence() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), r#"{ "fiber": { "birefringence": 0.0 } }"#);
    let out = sfwm(&["--config", &config, "phasematch"]);
    let stderr = failure_stderr(&out);
    assert!(stderr.contains("no phase-matched pump detuning"), "stderr: {stderr}");
}

#[test]
fn grating_reports_the_design_numbers() {
    let out = sfwm(&["grating"]);
    let v = ok_json(&out);
    let bands = v["bands"].as_array().unwrap();
    assert_eq!(bands.len(), 2);
    assert!((field(&bands[0], "center_nm") - 1540.0).abs() < 1e-9);
    assert!((field(&bands[1], "center_nm") - 1560.0).abs() < 1e-9);
    assert!((field(&bands[0], "kappa_l") - 136.36).abs() < 0.1);
    assert!((field(&bands[1], "kappa_l") - 134.62).abs() < 0.1);
    assert!((field(&bands[0], "stop_band_width_nm") - 1.4256).abs() < 0.01);
    assert!((field(&bands[1], "stop_band_width_nm") - 1.4444).abs() < 0.01);
    assert!((field(&bands[0], "period_nm") - 533.19).abs() < 0.1);
    assert!((field(&bands[1], "period_nm") - 540.20).abs() < 0.1);
    assert!((field(&v, "carrier_period_nm") - 536.67).abs() < 0.1);
    assert_eq!(v["period_count"].as_u64().unwrap(), 93167);
    assert!((field(&v, "beat_period_um") - 82.13).abs() < 0.1);
}

#[test]
fn grating_with_zero_contrast_warns_and_zeroes_out() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), r#"{ "grating": { "index_contrast": 0.0 } }"#);
    let out = sfwm(&["--config", &config, "grating"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning:"));
    let v = ok_json(&out);
    assert_eq!(v["warning"].as_str().unwrap(), "index contrast is zero: the stop bands vanish");
    for band in v["bands"].as_array().unwrap() {
        assert_eq!(field(band, "kappa_l"), 0.0);
        assert_eq!(field(band, "stop_band_width_nm"), 0.0);
    }
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = TempDir::new().unwrap();
    let config =
        write_config(dir.path(), r#"{ "fiber": { "length_m": 0.05, "typo_key": 1.0 } }"#);
    let out = sfwm(&["--config", &config, "phasematch"]);
    let stderr = failure_stderr(&out);
    assert!(stderr.contains("typo_key"), "stderr: {stderr}");
}

#[test]
fn invalid_values_name_the_config_path() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), r#"{ "fiber": { "length_m": -1.0 } }"#);
    let out = sfwm(&["--config", &config, "phasematch"]);
    assert!(failure_stderr(&out).contains("fiber.length_m"));

    let config = write_config(dir.path(), r#"{ "pumps": { "lambda_x_nm": 1545.0 } }"#);
    let out = sfwm(&["--config", &config, "phasematch"]);
    assert!(failure_stderr(&out).contains("set both or neither"));
}

#[test]
fn jsi_rerun_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), NARROW);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let args = |out: &Path| {
        vec![
            "--config".to_string(),
            config.clone(),
            "--out".to_string(),
            out.to_string_lossy().into_owned(),
            "jsi".to_string(),
            "--process".to_string(),
            "xy".to_string(),
            "--no-grating".to_string(),
        ]
    };
    let run_a = sfwm(&args(&out_a).iter().map(String::as_str).collect::<Vec<_>>());
    let run_b = sfwm(&args(&out_b).iter().map(String::as_str).collect::<Vec<_>>());
    ok_json(&run_a);
    ok_json(&run_b);

    let csv_a = std::fs::read(out_a.join("jsi_xy_no_grating.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("jsi_xy_no_grating.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let pgm_a = std::fs::read(out_a.join("jsi_xy_no_grating.pgm")).unwrap();
    let pgm_b = std::fs::read(out_b.join("jsi_xy_no_grating.pgm")).unwrap();
    assert_eq!(pgm_a, pgm_b);

    // Header row plus one row per grid point, each with a label and one cell
    // per column; labels in nanometers, descending with frequency ascending.
    let text = String::from_utf8(csv_a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 65);
    assert!(lines[0].starts_with("0,1.55200000e3,"));
    assert!(lines[1].starts_with("1.55200000e3,"));
    assert!(lines.iter().all(|l| l.split(',').count() == 65));
    assert!(text.ends_with('\n') && !text.contains('\r'));

    let header = String::from_utf8_lossy(&pgm_a[..64]).into_owned();
    assert!(header.starts_with("P5\n# "));
    assert!(header.contains("64 64"), "header: {header}");
    assert!(pgm_a.len() > 64 * 64);

    // Reruns into the same directory also reproduce the manifest verbatim.
    let again = sfwm(&args(&out_a).iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(run_a.stdout, again.stdout);
}

#[test]
fn jsi_backends_agree() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), NARROW);
    let mut grids = Vec::new();
    for backend in ["closed", "quadrature"] {
        let out_dir = dir.path().join(backend);
        let out = sfwm(&[
            "--config",
            &config,
            "--out",
            &out_dir.to_string_lossy(),
            "jsi",
            "--process",
            "xy",
            "--no-grating",
            "--backend",
            backend,
        ]);
        let v = ok_json(&out);
        assert_eq!(v["backend"].as_str().unwrap(), backend);
        assert!(field(&v, "peak") > 0.0);
        grids.push(parse_csv(v["files"]["xy"]["csv"].as_str().unwrap()));
    }
    let (closed, quad) = (&grids[0], &grids[1]);
    let peak = closed.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    for (row_c, row_q) in closed.iter().zip(quad) {
        for (&c, &q) in row_c.iter().zip(row_q) {
            assert!((c - q).abs() <= 1e-9 * peak, "backends disagree: {c} vs {q}");
        }
    }
}

#[test]
fn jsi_grating_changes_the_spectrum() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), FULL_COARSE);
    let out_dir = dir.path().join("out");
    let base = [
        "--config",
        &config,
        "--out",
        &out_dir.to_string_lossy(),
        "jsi",
        "--process",
        "xy",
    ];
    let with = sfwm(&base);
    let v = ok_json(&with);
    assert!(v["grating_enabled"].as_bool().unwrap());

    let mut bare_args = base.to_vec();
    bare_args.push("--no-grating");
    let bare = sfwm(&bare_args);
    let v = ok_json(&bare);
    assert!(!v["grating_enabled"].as_bool().unwrap());

    let guarded = std::fs::read(out_dir.join("jsi_xy.csv")).unwrap();
    let free = std::fs::read(out_dir.join("jsi_xy_no_grating.csv")).unwrap();
    assert_ne!(guarded, free);
}

#[test]
fn jsi_all_composes_the_three_processes() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), FULL_COARSE);
    let out_dir = dir.path().join("out");
    let out = sfwm(&["--config", &config, "--out", &out_dir.to_string_lossy(), "jsi"]);
    let v = ok_json(&out);
    assert_eq!(v["backend"].as_str().unwrap(), "closed");
    assert_eq!(v["mapping"].as_str().unwrap(), "linear");
    assert!(v["grating_enabled"].as_bool().unwrap());
    assert_eq!(v["points"].as_u64().unwrap(), 128);
    assert!(field(&v, "peak") > 0.0);
    let grid = parse_csv(v["files"]["all"]["csv"].as_str().unwrap());
    assert_eq!(grid.len(), 128);
    assert!(grid.iter().flatten().all(|&x| x >= 0.0));
}

#[test]
fn points_below_the_minimum_are_rejected() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), NARROW);
    let out = sfwm(&[
        "--config",
        &config,
        "--out",
        &dir.path().join("out").to_string_lossy(),
        "jsi",
        "--points",
        "32",
    ]);
    let stderr = failure_stderr(&out);
    assert!(stderr.contains("need at least 64"), "stderr: {stderr}");
}

#[test]
fn car_curve_structure_and_determinism() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), FULL_COARSE);
    let out_dir = dir.path().join("out");
    let args = [
        "--config",
        &config,
        "--out",
        &out_dir.to_string_lossy(),
        "car",
        "--zeta2-steps",
        "7",
    ];
    let out = sfwm(&args);
    let v = ok_json(&out);
    assert!(field(&v, "car_improvement_factor") > 1.0);
    assert!(field(&v, "r_x_with_grating") < field(&v, "r_x_no_grating"));
    assert!(field(&v, "r_y_with_grating") < field(&v, "r_y_no_grating"));
    assert!(field(&v, "suppression_db_x") < 0.0);
    assert!(field(&v, "suppression_db_y") < 0.0);
    assert_eq!(field(&v["zeta2"], "min"), 1e-4);
    assert_eq!(field(&v["zeta2"], "max"), 1.0);

    let csv_path = out_dir.join("car.csv");
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "zeta2,car_no_grating,car_with_grating,ideal_max");
    assert_eq!(lines.len(), 8);
    for line in &lines[1..] {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 4);
        let [z, free, guarded, ideal] = cells[..] else { unreachable!() };
        assert!(z > 0.0 && free > 0.0);
        assert!(guarded >= free);
        assert!(guarded <= ideal * (1.0 + 1e-9));
        assert!((ideal - 1.0 / z).abs() <= 1e-8 / z);
    }
    assert!(lines[1].starts_with("1.00000000e-4,"));
    assert!(lines[7].starts_with("1.00000000e0,"));

    let csv_bytes = std::fs::read(&csv_path).unwrap();
    let again = sfwm(&args);
    assert_eq!(out.stdout, again.stdout);
    assert_eq!(csv_bytes, std::fs::read(&csv_path).unwrap());
}

#[test]
fn car_single_step_and_bad_step_counts() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), FULL_COARSE);
    let out_dir = dir.path().join("out");
    let out = sfwm(&[
        "--config",
        &config,
        "--out",
        &out_dir.to_string_lossy(),
        "car",
        "--zeta2-steps",
        "1",
        "--zeta2-min",
        "1e-3",
    ]);
    ok_json(&out);
    let text = std::fs::read_to_string(out_dir.join("car.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("1.00000000e-3,"));

    let out = sfwm(&["--config", &config, "car", "--zeta2-steps", "0"]);
    assert!(failure_stderr(&out).contains("--zeta2-steps"));
}

#[test]
fn car_enforces_the_filter_width_bound() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        r#"{
          "detection": { "filter_width_rad_s": 1e13 },
          "grid": { "window_nm": [1535.0, 1565.0], "points": 128 }
        }"#,
    );
    let out = sfwm(&["--config", &config, "--out", &dir.path().to_string_lossy(), "car"]);
    let stderr = failure_stderr(&out);
    assert!(stderr.contains("must not exceed the stop-band collection bound"), "stderr: {stderr}");
}
