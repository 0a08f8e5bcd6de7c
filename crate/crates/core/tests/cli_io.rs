//! End-to-end runs of the installed binary: flag parsing, config files,
//! CSV shapes, exit codes.

use std::fs;
use std::process::{Command, Output};

fn kposc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kposc"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn data_rows(csv: &str) -> Vec<&str> {
    csv.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).collect()
}

#[test]
fn simulate_writes_manifest_header_and_anchor_row() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("run.csv");
    let out = kposc(&[
        "simulate",
        "--omega0", "1",
        "--kappa", "0.5",
        "--tau", "1.5707963267948966",
        "--n-kicks", "1",
        "--t-end", "3.141592653589793",
        "--samples", "5",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let csv = fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("# tool = kposc "), "missing manifest: {csv}");
    assert!(csv.contains("# subcommand = simulate"));
    assert!(csv.contains("# omega0 = 1\n"));
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "t,re_eps,im_eps,k_coeff,sigma_x");
    assert_eq!(rows[1], "0,1,0,1,0.5");
    let last: Vec<f64> = rows.last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - std::f64::consts::PI).abs() < 1e-12);
    assert!((last[3] - 2.0).abs() < 1e-9, "K(pi) = {}", last[3]);
}

#[test]
fn simulate_free_oscillator_holds_unit_squeeze() {
    let out = kposc(&[
        "simulate", "--omega0", "1", "--tau", "1", "--t-end", "50", "--samples", "997",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 998, "header plus samples");
    for row in &rows[1..] {
        let k: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!((k - 1.0).abs() <= 1e-12, "row {row}");
    }
}

#[test]
fn verify_single_kick_passes_and_documents_the_printed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("verify.csv");
    let out = kposc(&[
        "verify",
        "--omega0", "1",
        "--kappa", "0.5",
        "--tau", "1.5707963267948966",
        "--n-kicks", "1",
        "--t-end", "3.141592653589793",
        "--steps-per-interval", "4000",
        "--out", out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("canonical vs integrator: max |dK|"), "{text}");
    assert!(text.contains("interval-index offset sweep"), "{text}");
    assert!(text.contains("(as printed)"), "{text}");
    assert!(text.contains("result: PASS"), "{text}");
    let csv = fs::read_to_string(&out_path).unwrap();
    assert!(csv.contains("# pass = true"));
    let rows = data_rows(&csv);
    assert_eq!(rows[0], "t,k_canonical,k_oracle,k_closed,dev_oracle,dev_closed");
    let last: Vec<&str> = rows.last().unwrap().split(',').collect();
    let k_canonical: f64 = last[1].parse().unwrap();
    let k_closed: f64 = last[3].parse().unwrap();
    assert!((k_canonical - 2.0).abs() < 1e-9);
    assert!((k_closed - 1.0).abs() < 1e-9);
}

#[test]
fn verify_resonant_growth_fails_with_exit_two() {
    // chi/2 = cos 2 + 2 sin 2 = 1.40: twenty kicks amplify K to ~1e15,
    // far beyond what the absolute tolerance admits. The breach must be
    // reported, not masked.
    let out = kposc(&[
        "verify",
        "--omega0", "1",
        "--kappa", "2",
        "--tau", "2",
        "--n-kicks", "20",
        "--steps-per-interval", "500",
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("result: FAIL"), "{text}");
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("osc.cfg");
    fs::write(
        &path,
        "omega0=1.0, gamma=0, kappa=0.5, tau=1.5707963267948966, n_kicks=1\n",
    )
    .unwrap();
    let base = kposc(&[
        "simulate",
        "--config", path.to_str().unwrap(),
        "--t-end", "3.141592653589793",
        "--samples", "3",
    ]);
    assert!(base.status.success(), "stderr: {}", stderr(&base));
    let k_last: f64 = data_rows(&stdout(&base))
        .last().unwrap()
        .split(',').nth(3).unwrap()
        .parse().unwrap();
    assert!((k_last - 2.0).abs() < 1e-9);

    // kappa = 0 from the flag wins over the file: kick does nothing
    let overridden = kposc(&[
        "simulate",
        "--config", path.to_str().unwrap(),
        "--kappa", "0",
        "--t-end", "3.141592653589793",
        "--samples", "3",
    ]);
    assert!(overridden.status.success());
    let k_last: f64 = data_rows(&stdout(&overridden))
        .last().unwrap()
        .split(',').nth(3).unwrap()
        .parse().unwrap();
    assert!((k_last - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_with_comments_and_newlines_parses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("osc.cfg");
    fs::write(&path, "# damped setup\nomega0 = 2.0\ntau = 0.5\ngamma = 0.3\n").unwrap();
    let out = kposc(&[
        "simulate",
        "--config", path.to_str().unwrap(),
        "--t-end", "1",
        "--samples", "2",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_config_key_reports_line_and_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("osc.cfg");
    fs::write(&path, "omega0=1\ntau=1\nomga=2\n").unwrap();
    let out = kposc(&[
        "simulate", "--config", path.to_str().unwrap(), "--t-end", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("omga"), "{err}");
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn invalid_physics_exits_one_with_named_field() {
    let out = kposc(&["simulate", "--omega0", "1", "--tau", "1", "--gamma", "-0.1", "--t-end", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("gamma"), "{}", stderr(&out));

    let critical = kposc(&["simulate", "--omega0", "1", "--tau", "1", "--gamma", "1", "--t-end", "1"]);
    assert_eq!(critical.status.code(), Some(1));
    assert!(stderr(&critical).to_lowercase().contains("critical"), "{}", stderr(&critical));

    let missing = kposc(&["simulate", "--tau", "1", "--t-end", "1"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).contains("omega0"), "{}", stderr(&missing));
}

#[test]
fn unwritable_output_path_exits_three() {
    let out = kposc(&[
        "simulate", "--omega0", "1", "--tau", "1", "--t-end", "1",
        "--out", "/nonexistent-dir/run.csv",
    ]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", stderr(&out));
}

#[test]
fn stability_map_emits_grid_with_classes() {
    let out = kposc(&[
        "stability-map",
        "--x-min", "1.5707963267948966",
        "--x-max", "3.141592653589793",
        "--x-count", "3",
        "--y-count", "3",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows[0], "omega0_tau,kappa_over_omega0,re_chi_half,im_chi_half,class");
    assert_eq!(rows.len(), 1 + 9);
    assert!(text.contains("elliptic"));
    assert!(text.contains("parabolic"));
    assert!(rows[1].starts_with("1.5707963267948966,0,"));
}

#[test]
fn sweep_emits_params_major_csv() {
    let out = kposc(&[
        "sweep",
        "--omega0", "1", "--tau", "1", "--n-kicks", "2",
        "--x-param", "kappa_over_omega0", "--x-min", "0", "--x-max", "0.4", "--x-count", "2",
        "--y-param", "gamma", "--y-min", "0", "--y-max", "0.2", "--y-count", "2",
        "--t-end", "2", "--samples", "3",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows[0], "kappa_over_omega0,gamma,t,k_coeff");
    assert_eq!(rows.len(), 1 + 2 * 2 * 3);
    assert!(rows[1].starts_with("0,0,0,"));
    assert!(rows[4].starts_with("0,0.2,0,"));
}

#[test]
fn closed_forms_rejects_strong_damping_cleanly() {
    let out = kposc(&[
        "closed-forms", "--omega0", "0.5", "--gamma", "1", "--tau", "1", "--t-end", "2",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("closed-forms"), "{err}");
    assert!(err.contains("strong"), "{err}");
}

#[test]
fn closed_forms_single_kick_tracks_canonical_in_weak_regime() {
    let out = kposc(&[
        "closed-forms",
        "--omega0", "1", "--gamma", "0.2", "--kappa", "0.4", "--tau", "1",
        "--n-kicks", "1", "--t-end", "4", "--samples", "41", "--single-kick",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let rows_text = stdout(&out);
    let rows = data_rows(&rows_text);
    assert_eq!(rows[0], "t,k_canonical,k_closed,dev");
    for row in &rows[1..] {
        let dev: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
        assert!(dev.abs() <= 1e-9, "row {row}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    let help = kposc(&["--help"]);
    assert!(help.status.success());
    assert!(stdout(&help).contains("simulate"));
    let version = kposc(&["--version"]);
    assert!(version.status.success());
    assert!(stdout(&version).contains("kposc"));

    let bad = kposc(&["simulate", "--no-such-flag"]);
    assert_eq!(bad.status.code(), Some(1));
}
