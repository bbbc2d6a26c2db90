use std::process::{Command, Output};

use dirac_pol::io::{read_report_json, read_sweep_csv};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac-pol")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .unwrap_or_else(|| panic!("{key} missing"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn free_two_mode_spectrum() {
    let o = run(&["--depth-vector", "0", "--modes", "2", "spectrum"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let energies: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(energies.len(), 5);
    assert!((energies[3] - 1.012_261_83).abs() < 1e-8);
    assert!((energies[4] - 1.048_187_03).abs() < 1e-8);
}

#[test]
fn zero_charge_gives_zero_alpha() {
    let o = run(&["--modes", "40", "--charge", "0", "alpha"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for key in ["alpha_qm", "alpha", "alpha_vac_prime"] {
        assert_eq!(value(&out, key), 0.0);
    }
    assert!(value(&out, "s_qm") < 0.0);
}

#[test]
fn json_report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = run(&["--modes", "40", "--format", "json", "-o", path.to_str().unwrap(), "alpha"]);
    assert!(o.status.success());
    let r = read_report_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(r.alpha > r.alpha_qm && r.alpha_qm > 0.0);
    assert!(r.identity_residual <= r.identity_bound());
}

#[test]
fn oracle_agrees() {
    let o = run(&["--modes", "100", "--format", "json", "alpha", "--oracle"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("\"within_tolerance\": true"));
}

#[test]
fn invalid_width_exits_2() {
    let o = run(&["--width", "-2", "--error-json", "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "invalid_parameter");
}

#[test]
fn well_wider_than_box_exits_2() {
    let o = run(&["--width", "30", "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "[potential]\ndepth = 1.0\n").unwrap();
    let o = run(&["--config", path.to_str().unwrap(), "spectrum"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "[potential]\ndepth_vector = 0.0\n[basis]\nmodes = 2\n").unwrap();
    let base = stdout(&run(&["--config", path.to_str().unwrap(), "spectrum"]));
    assert_eq!(base.lines().count(), 6);
    let over = stdout(&run(&["--config", path.to_str().unwrap(), "--modes", "3", "spectrum"]));
    assert_eq!(over.lines().count(), 8);
}

#[test]
fn supercritical_depth_exits_3() {
    let o = run(&["--depth-vector", "1.8", "--modes", "60", "--error-json", "alpha"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "level_crossed_zero");
}

#[test]
fn vector_sweep_without_sign_change_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let o = run(&[
        "--modes", "40", "-o", path.to_str().unwrap(),
        "sweep", "--depth-max", "1.2", "--steps", "5", "--bracket",
    ]);
    assert_eq!(o.status.code(), Some(5));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("depth_vector,epsilon_1,alpha_qm,alpha,alpha_vac_prime,identity_residual,D,L"));
    let (_, rows) = read_sweep_csv(&text).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.alpha_qm > 0.0));
}

#[test]
fn scalar_sweep_brackets_sign_change() {
    let o = run(&[
        "--modes", "60", "--depth-vector", "0",
        "sweep", "--axis", "scalar", "--depth-min", "1", "--depth-max", "2", "--steps", "3", "--bracket",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("depth_scalar,"));
    assert!(out.contains("# bracket"));
}

#[test]
fn sweep_stops_at_collapse() {
    let o = run(&["--modes", "40", "sweep", "--depth-max", "2", "--steps", "5"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("# stopped"));
    let (_, rows) = read_sweep_csv(&out).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn convergence_table() {
    let o = run(&["converge", "--modes-list", "40,80", "--lengths", "20"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert!(out.contains("# status"));
}
