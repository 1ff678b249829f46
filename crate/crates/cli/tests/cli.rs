use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn monopole(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monopole")).args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    (header, rows)
}

#[test]
fn solve_writes_profile_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("profile.csv");
    let o = monopole(&["solve", "--m", "-2", "--g", "1", "--h0", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, "s,tau,r,K,U,res_eq1,res_eq2");
    assert_eq!(rows.len(), 2000);
    assert!(rows.iter().all(|r| r.len() == 7));
    // K is non-increasing in the table (it underflows to 0 in the far field)
    // and U strictly increasing until it rounds to 1.
    for w in rows.windows(2) {
        assert!(w[1][3] <= w[0][3]);
        assert!(w[1][4] > w[0][4] || w[1][4] == 1.0 || w[0][4] > 1.0 - 1e-12);
    }

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("profile.csv.summary.json")).unwrap()).unwrap();
    let keys: Vec<&str> = summary.as_object().unwrap().keys().map(String::as_str).collect();
    let mut want = vec!["params", "shooting", "asymptotics", "charge_energy", "residual_max", "gates"];
    want.sort();
    let mut got = keys.clone();
    got.sort();
    assert_eq!(got, want);
    assert!(summary["gates"].as_array().unwrap().iter().all(|g| g["passed"] == true));
    assert!((summary["charge_energy"]["psi"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn unit_scale_table_has_tau_equal_r() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = monopole(&["solve", "--m", "-2", "--g", "1.224744871", "--h0", "1", "--grid", "1000", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (_, rows) = read_csv(&out);
    for r in rows {
        assert!((r[1] - r[2]).abs() <= 1e-9 * r[1].max(1.0));
    }
}

#[test]
fn output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = monopole(&["solve", "--m", "-3", "--grid", "1000", "--format", "json", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sa = fs::read(dir.path().join("a.json.summary.json")).unwrap();
    let sb = fs::read(dir.path().join("b.json.summary.json")).unwrap();
    assert_eq!(sa, sb);
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(&a).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1000);
    assert!(rows[0]["K"].is_number());
}

#[test]
fn profile_to_stdout_summary_to_stderr() {
    let o = monopole(&["solve", "--grid", "1000"]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("s,tau,r,K,U,res_eq1,res_eq2\n"));
    assert_eq!(stdout.lines().count(), 1001);
    let summary: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(summary["shooting"]["n_star"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_configuration_exits_two() {
    for args in [
        &["solve", "--m", "-0.5"][..],
        &["solve", "--g", "0"],
        &["solve", "--grid", "4"],
        &["solve", "--unknown"],
        &["sweep", "--m-list", "-2,-1"],
    ] {
        let o = monopole(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
    let o = monopole(&["solve", "--m", "-0.5"]);
    let record: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "config");
}

#[test]
fn solver_failure_exits_one() {
    let o = monopole(&["solve", "--s-max", "0.3"]);
    assert_eq!(o.status.code(), Some(1));
    let record: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(record["error"]["kind"], "solver");
    assert_eq!(record["error"]["m"], -2.0);
    assert!(record["error"]["message"].as_str().unwrap().contains("s_max"));
}

#[test]
fn short_horizon_fails_gates() {
    let o = monopole(&["solve", "--s-max", "1", "--grid", "400"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("tail not converged"), "{err}");
}

#[test]
fn sweep_rows_follow_input_order() {
    let o = monopole(&["sweep", "--m-list", "-1.2,-2,-4,-2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n_star,sigma_inf,s0"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    let ms: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(ms, vec![-1.2, -2.0, -4.0, -2.0]);
    assert!(rows[0][1] < rows[1][1] && rows[1][1] < rows[2][1]);
    assert!((rows[1][1] - rows[3][1]).abs() <= 1e-10);
}

#[test]
fn single_sweep_matches_solve_summary() {
    let o = monopole(&["sweep", "--m-list", "-3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = monopole(&["solve", "--m", "-3", "--grid", "100"]);
    let stderr = String::from_utf8(s.stderr).unwrap();
    let summary: serde_json::Value = serde_json::from_str(stderr.lines().next().unwrap()).unwrap();
    for key in ["n_star", "sigma_inf", "s0"] {
        assert_eq!(rows[0][key], summary["shooting"][key], "{key}");
    }
}

#[test]
fn verify_reports_every_criterion() {
    let o = monopole(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}

#[test]
fn loose_tolerance_degrades_verify() {
    let o = monopole(&["verify", "--ode-tol", "1e-4"]);
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("Bogomolny residuals")).unwrap();
    assert!(line.starts_with("[FAIL]"), "{line}");
}

#[test]
fn truncated_horizon_fails_verify_with_diagnostic() {
    let o = monopole(&["verify", "--s-max", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8(o.stdout).unwrap();
    let line = text.lines().find(|l| l.contains("boundary realization")).unwrap();
    assert!(line.starts_with("[FAIL]") && line.contains("increase --s-max"), "{line}");
}

#[test]
fn coarse_grid_fails_residual_gate() {
    let o = monopole(&["solve", "--grid", "100"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    let mut lines = err.lines();
    let summary: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert!(summary["residual_max"]["eq1"].as_f64().unwrap() > 1e-6);
    assert!(lines.any(|l| l.starts_with("gate failed: residuals")));
}
