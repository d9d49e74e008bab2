use std::process::{Command, Output};

use serde_json::Value;

fn evasion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evasion"))
        .args(args)
        .output()
        .expect("run evasion binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn payload(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v["payload"].clone()
}

#[test]
fn solve_writes_trajectory_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("traj.csv");
    let out = evasion(&[
        "solve",
        "--x0",
        "2,0.3",
        "--mu",
        "0.6",
        "--T",
        "2.6",
        "--samples",
        "200",
        "--out",
        path.to_str().unwrap(),
    ]);
    let p = payload(&out);
    assert_eq!(p["regime"], "constrained");
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,y,dist,phase_index"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 200);
    assert_eq!(rows[0][0], 0.0);
    assert!((rows[199][0] - 2.6).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[3] >= 1.0 - 1e-9));
    let phases: Vec<f64> = rows.iter().map(|r| r[4]).collect();
    assert!(phases.windows(2).all(|w| w[1] >= w[0]));
    assert_eq!(phases[199], 2.0);
    let d_f = p["final_distance"].as_f64().unwrap();
    assert!((rows[199][3] - d_f).abs() < 1e-9);
}

#[test]
fn sweep_marks_nonunique_row() {
    let out = evasion(&[
        "sweep-t", "--x0", "2,0", "--mu", "0.6", "--Tmin", "0", "--Tmax", "4", "--steps", "401",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().find(|l| l.starts_with("2,")).unwrap();
    assert!(row.ends_with(",true,false"), "{row}");
    assert_eq!(text.lines().filter(|l| l.contains(",true,")).count(), 1);
}

#[test]
fn sweep_distance_is_continuous_across_critical_time() {
    let out = evasion(&[
        "sweep-t", "--x0", "2,0.3", "--mu", "0.6", "--Tmin", "0", "--Tmax", "4", "--steps", "400",
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("T,regime,theta_exit,d_f,x_f,y_f,capture_time,nonunique,reflected")
    );
    let d: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(d.len(), 400);
    // d_f can move no faster than the largest relative speed, 1 + mu.
    let step = 1.6 * 4.0 / 399.0;
    assert!(d.windows(2).all(|w| (w[1] - w[0]).abs() <= step + 1e-9));
}

#[test]
fn region_map_zero_horizon() {
    let out = evasion(&["region-map", "--mu", "0.6", "--T", "0", "--res", "20x10"]);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("x,y,regime"));
    assert_eq!(text.lines().count(), 201);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",unconstrained") || l.ends_with(",inside")));
}

#[test]
fn region_map_capture_cell() {
    let out = evasion(&[
        "region-map",
        "--mu",
        "0.6",
        "--T",
        "2",
        "--bounds",
        "1.1,1.3,-0.1,0.1",
        "--res",
        "1x1",
    ]);
    assert_eq!(stdout(&out), "x,y,regime\n1.2,0,capture\n");
}

#[test]
fn nash_outputs() {
    let p = payload(&evasion(&["nash", "--x0", "2,0.3", "--mu", "0.6"]));
    assert!((p["psi_ne"].as_f64().unwrap() - 0.6f64.acos()).abs() < 1e-11);
    let out = evasion(&["nash", "--x0", "1.05,0", "--mu", "0.7"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "domain");
}

#[test]
fn verify_examples_pass() {
    for args in [
        [
            "verify", "--x0", "2,0.3", "--mu", "0.6", "--T", "2.6", "--grid", "2000",
        ],
        [
            "verify", "--x0", "2,0", "--mu", "0.6", "--T", "1", "--grid", "3600",
        ],
        [
            "verify", "--x0", "1.05,0", "--mu", "0.7", "--T", "2", "--grid", "3600",
        ],
    ] {
        let p = payload(&evasion(&args));
        assert_eq!(p["pass"], true, "{args:?}");
    }
}

#[test]
fn usage_errors() {
    let out = evasion(&["solve", "--x0", "2", "--mu", "0.6", "--T", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serde_json::from_slice::<Value>(&out.stderr).is_ok());
    let out = evasion(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = evasion(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("sweep-t"));
}

#[test]
fn outputs_are_repeatable() {
    let args = ["solve", "--x0", "2,0.3", "--mu", "0.6", "--T", "2.6"];
    assert_eq!(evasion(&args).stdout, evasion(&args).stdout);
}
