//! End-to-end checks of the command-line interface.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracphase"))
}

#[test]
fn bad_flags_exit_with_usage_code() {
    let out = bin().arg("--nonsense").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["coeffs", "--alpha", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2)); // missing required flags
}

#[test]
fn coeffs_emits_csv_with_footer() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("coeffs.csv");
    let out = bin()
        .args(["coeffs", "--alpha", "0.5", "--n", "10"])
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "j,a,b,c,d");
    assert_eq!(lines.len(), 12);
    assert!(lines[11].starts_with("r1,"));
}

#[test]
fn analyze_writes_report_and_q_signs() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "analyze",
            "--alpha-grid",
            "0.5",
            "--n-grid",
            "2,8",
            "--i-max",
            "12",
            "--trials",
            "50",
        ])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 3); // header + 2 rows
    let q = std::fs::read_to_string(dir.path().join("q_signs.csv")).unwrap();
    assert!(q.starts_with("alpha,i,j,Q1,Q2,Q3"));
    assert_eq!(q.lines().count(), 1 + (12 * 11) / 2);
}

#[test]
fn run_consumes_config_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("artifacts");
    let config = format!(
        r#"{{
            "model": "allen_cahn",
            "scheme": "sav",
            "alpha": 0.5,
            "epsilon": 0.5,
            "nx": 16, "ny": 16,
            "domain": "zero_2pi",
            "dt": 0.02,
            "t_final": 0.1,
            "initial_condition": {{"uniform_random": {{"lo": -0.5, "hi": 0.5, "seed": 11}}}},
            "output_dir": {:?}
        }}"#,
        out_dir.to_str().unwrap()
    );
    let cfg_path = dir.path().join("run.json");
    std::fs::write(&cfg_path, config).unwrap();
    let out = bin().arg("run").arg("--config").arg(&cfg_path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let energy = std::fs::read_to_string(out_dir.join("energy.csv")).unwrap();
    assert!(energy.starts_with("n,t,E,E_mod,DkE,frac_sum"));
    assert_eq!(energy.lines().count(), 7); // header + E^0..E^5
    assert!(out_dir.join("verdict.txt").exists());

    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("verdicts:"), "stdout: {stdout}");
}

#[test]
fn convergence_prints_rate_table() {
    let out = bin()
        .args([
            "convergence",
            "--scheme",
            "sav",
            "--alpha",
            "0.5",
            "--dt-list",
            "0.1,0.05",
            "--nx",
            "16",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("l2_error"));
    assert_eq!(stdout.lines().count(), 3);
}

#[test]
fn quick_verify_passes() {
    let out = bin().args(["verify", "--quick"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[PASS]"));
    assert!(!stdout.contains("[FAIL]"));
    assert!(stdout.contains("checks passed"));
}

#[test]
fn rejected_config_reports_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.json");
    std::fs::write(&cfg_path, r#"{"model": "cahn_hilliard"}"#).unwrap();
    let out = bin().arg("run").arg("--config").arg(&cfg_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}
