//! Command-line front end. Single-result commands print JSON, table commands
//! print CSV. Output is formatted deterministically so it can be diffed.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::capture::{in_no_escape_zone, survival_time, GameSpec};
use crate::constrained::{arc_time, classify, solve};
use crate::error::Error;
use crate::kinematics::{propagate_straight, RelState, SpeedRatio};
use crate::nash::equilibrium;
use crate::oracle::{sweep_constant_headings, sweep_exit_angles};
use crate::solution::{Phase, TrajectorySolution};
use crate::RegimeClass;

pub const SCHEMA_VERSION: u32 = 1;

/// Significant digits kept in every printed number.
const SIG_DIGITS: usize = 12;

pub const VERIFY_TOLERANCE: f64 = 1e-3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "evasion",
    version,
    about = "Optimal evasion from a constant-velocity pursuer"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal trajectory for one instance.
    Solve {
        #[arg(long = "x0", value_parser = parse_pair, allow_hyphen_values = true)]
        x0: (f64, f64),
        #[arg(long)]
        mu: f64,
        #[arg(long = "T")]
        horizon: f64,
        /// Number of trajectory samples written to --out.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// CSV file for sampled trajectory points.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Final state of the optimum as the horizon varies.
    #[command(name = "sweep-t", alias = "sweep-T")]
    SweepT {
        #[arg(long = "x0", value_parser = parse_pair, allow_hyphen_values = true)]
        x0: (f64, f64),
        #[arg(long)]
        mu: f64,
        #[arg(long = "Tmin")]
        t_min: f64,
        #[arg(long = "Tmax")]
        t_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regime of every cell of a grid of start states.
    RegionMap {
        #[arg(long)]
        mu: f64,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true, default_value = "-1.5,3.5,0,2.5")]
        bounds: Bounds,
        #[arg(long, value_parser = parse_res, default_value = "400x400")]
        res: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximum survival time over a grid of start states.
    SurvivalMap {
        #[arg(long)]
        mu: f64,
        #[arg(long, value_parser = parse_bounds, allow_hyphen_values = true, default_value = "-1.5,3.5,0,2.5")]
        bounds: Bounds,
        #[arg(long, value_parser = parse_res, default_value = "400x400")]
        res: (usize, usize),
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Equilibrium heading, horizon and value.
    Nash {
        #[arg(long = "x0", value_parser = parse_pair, allow_hyphen_values = true)]
        x0: (f64, f64),
        #[arg(long)]
        mu: f64,
    },
    /// Compare the analytic optimum with brute-force simulation sweeps.
    Verify {
        #[arg(long = "x0", value_parser = parse_pair, allow_hyphen_values = true)]
        x0: (f64, f64),
        #[arg(long)]
        mu: f64,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long, default_value_t = 3600)]
        grid: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::SweepT { .. } => "sweep-t",
            Command::RegionMap { .. } => "region-map",
            Command::SurvivalMap { .. } => "survival-map",
            Command::Nash { .. } => "nash",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Bounds {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_list(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {s:?}"));
    }
    parts.into_iter().map(parse_number).collect()
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_list(s, 2)?;
    Ok((v[0], v[1]))
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let v = parse_list(s, 4)?;
    let b = Bounds {
        x0: v[0],
        x1: v[1],
        y0: v[2],
        y1: v[3],
    };
    if b.x0 < b.x1 && b.y0 < b.y1 {
        Ok(b)
    } else {
        Err(format!("bounds need x0 < x1 and y0 < y1, got {s:?}"))
    }
}

fn parse_res(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("resolution must look like WxH, got {s:?}"))?;
    let w: usize = w
        .trim()
        .parse()
        .map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h
        .trim()
        .parse()
        .map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err(format!("resolution must be at least 1x1, got {s:?}"));
    }
    Ok((w, h))
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Failure surfaced to the user.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Solver(e)
    }
}

impl Failure {
    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Solver(e) => match e {
                Error::Domain(_) => "domain",
                Error::Config(_) => "config",
                Error::NoFeasiblePolicy => "no_feasible_policy",
                Error::Bracket { .. } => "bracket",
                Error::Quadrature { .. } => "quadrature",
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Io(m) => m.clone(),
            Failure::Solver(e) => e.to_string(),
        }
    }
}

type CmdResult = Result<(i32, String), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: error_json("", &Failure::Usage(text.trim_end().to_string())),
                },
            };
        }
    };
    let name = cli.command.name();
    match execute(cli.command) {
        Ok((code, stdout)) => Output {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(f) => Output {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: error_json(name, &f),
        },
    }
}

fn error_json(command: &str, f: &Failure) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "error": { "kind": f.kind(), "message": f.message() },
    });
    format!(
        "{}\n",
        serde_json::to_string_pretty(&v).expect("json value serializes")
    )
}

fn execute(cmd: Command) -> CmdResult {
    let name = cmd.name();
    match cmd {
        Command::Solve {
            x0,
            mu,
            horizon,
            samples,
            out,
        } => cmd_solve(x0, mu, horizon, samples, out),
        Command::SweepT {
            x0,
            mu,
            t_min,
            t_max,
            steps,
            out,
        } => emit_csv(cmd_sweep_t(x0, mu, t_min, t_max, steps)?, out),
        Command::RegionMap {
            mu,
            horizon,
            bounds,
            res,
            out,
        } => emit_csv(cmd_region_map(mu, horizon, bounds, res)?, out),
        Command::SurvivalMap {
            mu,
            bounds,
            res,
            out,
        } => emit_csv(cmd_survival_map(mu, bounds, res)?, out),
        Command::Nash { x0, mu } => {
            let (x0, reflected) = RelState::try_new(x0.0, x0.1)?.to_upper_half();
            let pair = equilibrium(x0, speed(mu)?)?;
            let payload = json!({
                "x0": [x0.x, x0.y],
                "mu": mu,
                "reflected": reflected,
                "psi_ne": pair.psi_ne,
                "t_ne": pair.t_ne,
                "value": pair.value,
            });
            Ok((EXIT_OK, record(name, payload)?))
        }
        Command::Verify {
            x0,
            mu,
            horizon,
            grid,
        } => cmd_verify(x0, mu, horizon, grid),
    }
}

fn speed(mu: f64) -> Result<SpeedRatio, Failure> {
    Ok(SpeedRatio::new(mu)?)
}

fn instance(x0: (f64, f64), mu: f64, horizon: f64) -> Result<(GameSpec, bool), Failure> {
    Ok(GameSpec::normalized(
        RelState::try_new(x0.0, x0.1)?,
        speed(mu)?,
        horizon,
    )?)
}

/// Rounds to [`SIG_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIG_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Number as printed in CSV cells.
pub fn fmt_num(x: f64) -> String {
    round_sig(x).to_string()
}

fn round_value(v: &mut Value) -> Result<(), Failure> {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = json!(round_sig(x));
        }
        Value::Array(items) => items.iter_mut().try_for_each(round_value)?,
        Value::Object(map) => map.values_mut().try_for_each(round_value)?,
        _ => {}
    }
    Ok(())
}

/// Wraps a payload in the output envelope.
fn record(command: &str, mut payload: Value) -> Result<String, Failure> {
    round_value(&mut payload)?;
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "payload": payload,
    });
    // serde_json maps non-finite floats to null.
    let text = serde_json::to_string_pretty(&v).expect("json value serializes");
    Ok(format!("{text}\n"))
}

fn emit_csv(csv: String, out: Option<PathBuf>) -> CmdResult {
    match out {
        Some(path) => {
            std::fs::write(&path, csv)
                .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok((EXIT_OK, String::new()))
        }
        None => Ok((EXIT_OK, csv)),
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn state_json(s: RelState) -> Value {
    json!([s.x, s.y])
}

fn solution_json(sol: &TrajectorySolution) -> Value {
    let starts = sol.switch_times();
    let phases: Vec<Value> = sol
        .phases
        .iter()
        .zip(&starts)
        .map(|(p, &t0)| match p {
            Phase::Straight(s) => json!({
                "kind": "straight",
                "start_time": t0,
                "duration": s.duration,
                "psi": s.psi,
                "start": state_json(s.start),
                "end": state_json(s.end),
            }),
            Phase::Arc(a) => json!({
                "kind": "arc",
                "start_time": t0,
                "duration": a.duration,
                "theta_start": a.theta_start,
                "theta_end": a.theta_end,
                "start": state_json(p.start_state()),
                "end": state_json(p.end_state()),
            }),
        })
        .collect();
    json!({
        "regime": sol.regime.label(),
        "phases": phases,
        "switch_times": starts.iter().skip(1).collect::<Vec<_>>(),
        "theta_exit": sol.theta_exit(),
        "final_state": state_json(sol.final_state),
        "final_distance": sol.final_distance,
        "capture_time": sol.capture_time,
        "nonunique": sol.nonunique,
    })
}

/// Angle reached after riding for `tau` from `theta_start`.
fn arc_angle_at(
    tau: f64,
    theta_start: f64,
    theta_end: f64,
    mu: SpeedRatio,
) -> Result<f64, Failure> {
    let (mut lo, mut hi) = (theta_start, theta_end);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if arc_time(theta_start, mid, mu)? < tau {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn trajectory_csv(
    sol: &TrajectorySolution,
    mu: SpeedRatio,
    samples: usize,
) -> Result<String, Failure> {
    let total = sol.total_duration();
    let starts = sol.switch_times();
    let mut csv = String::from("t,x,y,dist,phase_index\n");
    for i in 0..samples {
        let t = if samples > 1 {
            total * i as f64 / (samples - 1) as f64
        } else {
            0.0
        };
        let idx = starts
            .iter()
            .rposition(|&s| s <= t)
            .unwrap_or(0)
            .min(sol.phases.len().saturating_sub(1));
        let p = match sol.phases.get(idx) {
            None => RelState::new(f64::NAN, f64::NAN),
            Some(Phase::Straight(s)) => {
                propagate_straight(s.start, s.psi, mu, (t - starts[idx]).min(s.duration))
            }
            Some(Phase::Arc(a)) => {
                let tau = (t - starts[idx]).min(a.duration);
                RelState::on_circle(arc_angle_at(tau, a.theta_start, a.theta_end, mu)?)
            }
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_num(t),
            fmt_num(p.x),
            fmt_num(p.y),
            fmt_num(p.norm()),
            idx
        );
    }
    Ok(csv)
}

fn cmd_solve(
    x0: (f64, f64),
    mu: f64,
    horizon: f64,
    samples: usize,
    out: Option<PathBuf>,
) -> CmdResult {
    let (spec, reflected) = instance(x0, mu, horizon)?;
    let sol = solve(&spec)?;
    if let Some(path) = out {
        let csv = trajectory_csv(&sol, spec.mu, samples)?;
        std::fs::write(&path, csv)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let mut payload = solution_json(&sol);
    payload["input"] = json!({
        "x0": state_json(spec.x0),
        "mu": mu,
        "T": horizon,
    });
    payload["reflected"] = json!(reflected);
    Ok((EXIT_OK, record("solve", payload)?))
}

fn cmd_sweep_t(
    x0: (f64, f64),
    mu: f64,
    t_min: f64,
    t_max: f64,
    steps: usize,
) -> Result<String, Failure> {
    if t_min >= t_max || t_min.is_nan() || t_max.is_nan() {
        return Err(Failure::Usage(format!(
            "need Tmin < Tmax, got {t_min} and {t_max}"
        )));
    }
    if steps < 2 {
        return Err(Failure::Usage(format!("need steps >= 2, got {steps}")));
    }
    // Validate once so the per-row errors cannot differ.
    let (_, reflected) = instance(x0, mu, t_min.max(0.0))?;
    let rows = (0..steps)
        .into_par_iter()
        .map(|i| {
            let t = if i + 1 == steps {
                t_max
            } else {
                t_min + (t_max - t_min) * i as f64 / (steps - 1) as f64
            };
            let (spec, _) = instance(x0, mu, t)?;
            let sol = solve(&spec)?;
            Ok(format!(
                "{},{},{},{},{},{},{},{},{}\n",
                fmt_num(t),
                sol.regime.label(),
                opt_num(sol.theta_exit()),
                fmt_num(sol.final_distance),
                fmt_num(sol.final_state.x),
                fmt_num(sol.final_state.y),
                opt_num(sol.capture_time),
                sol.nonunique,
                reflected,
            ))
        })
        .collect::<Result<Vec<String>, Failure>>()?;
    let mut csv =
        String::from("T,regime,theta_exit,d_f,x_f,y_f,capture_time,nonunique,reflected\n");
    csv.extend(rows);
    Ok(csv)
}

fn cell_centers(b: Bounds, res: (usize, usize)) -> (Vec<f64>, Vec<f64>) {
    let (w, h) = res;
    let xs = (0..w)
        .map(|i| b.x0 + (b.x1 - b.x0) * (i as f64 + 0.5) / w as f64)
        .collect();
    let ys = (0..h)
        .map(|j| b.y0 + (b.y1 - b.y0) * (j as f64 + 0.5) / h as f64)
        .collect();
    (xs, ys)
}

/// Rows of a raster, one cell value per column, in row-major order.
fn raster<F>(header: &str, b: Bounds, res: (usize, usize), cell: F) -> Result<String, Failure>
where
    F: Fn(f64, f64) -> Result<String, Failure> + Sync,
{
    let (xs, ys) = cell_centers(b, res);
    let rows = ys
        .par_iter()
        .map(|&y| {
            let mut row = String::new();
            for &x in &xs {
                let _ = writeln!(row, "{},{},{}", fmt_num(x), fmt_num(y), cell(x, y)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<String>, Failure>>()?;
    let mut csv = format!("{header}\n");
    csv.extend(rows);
    Ok(csv)
}

/// Label of one region-map cell.
pub fn region_label(x: f64, y: f64, mu: SpeedRatio, horizon: f64) -> crate::Result<&'static str> {
    let (p, _) = RelState::new(x, y).to_upper_half();
    if p.norm() < 1.0 {
        return Ok("inside");
    }
    let spec = GameSpec::new(p, mu, horizon)?;
    Ok(classify(&spec)?.label())
}

fn cmd_region_map(
    mu: f64,
    horizon: f64,
    b: Bounds,
    res: (usize, usize),
) -> Result<String, Failure> {
    let mu = speed(mu)?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Failure::Usage(format!(
            "horizon must be >= 0, got {horizon}"
        )));
    }
    raster("x,y,regime", b, res, |x, y| {
        Ok(region_label(x, y, mu, horizon)?.to_string())
    })
}

fn cmd_survival_map(mu: f64, b: Bounds, res: (usize, usize)) -> Result<String, Failure> {
    let mu = speed(mu)?;
    raster("x,y,t_survive", b, res, |x, y| {
        let (p, _) = RelState::new(x, y).to_upper_half();
        if p.norm() < 1.0 || !in_no_escape_zone(p, mu) {
            return Ok(String::new());
        }
        Ok(fmt_num(survival_time(p, mu)?))
    })
}

fn cmd_verify(x0: (f64, f64), mu: f64, horizon: f64, grid: usize) -> CmdResult {
    let (spec, reflected) = instance(x0, mu, horizon)?;
    let sol = solve(&spec)?;
    let (analytic, oracle, oracle_param, status, pass) = match sol.regime {
        RegimeClass::GuaranteedCapture { .. } => {
            match sweep_constant_headings(spec.x0, spec.mu, horizon, grid) {
                Err(Error::NoFeasiblePolicy) => (None, None, None, "no_feasible_policy", true),
                Err(e) => return Err(e.into()),
                Ok(best) => (
                    None,
                    Some(best.best_final_distance),
                    Some(best.best_param),
                    "feasible",
                    false,
                ),
            }
        }
        RegimeClass::UnconstrainedEscape | RegimeClass::ConstrainedEscape => {
            let best = if sol.regime == RegimeClass::UnconstrainedEscape {
                sweep_constant_headings(spec.x0, spec.mu, horizon, grid)?
            } else {
                sweep_exit_angles(spec.x0, spec.mu, horizon, grid)?
            };
            let gap = (sol.final_distance - best.best_final_distance).abs();
            (
                Some(sol.final_distance),
                Some(best.best_final_distance),
                Some(best.best_param),
                "feasible",
                gap <= VERIFY_TOLERANCE,
            )
        }
    };
    let gap = analytic.zip(oracle).map(|(a, o)| (a - o).abs());
    let payload = json!({
        "input": { "x0": state_json(spec.x0), "mu": mu, "T": horizon, "grid": grid },
        "reflected": reflected,
        "regime": sol.regime.label(),
        "analytic": analytic,
        "oracle": oracle,
        "oracle_policy": oracle_param,
        "oracle_status": status,
        "gap": gap,
        "tolerance": VERIFY_TOLERANCE,
        "pass": pass,
    });
    let code = if pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok((code, record("verify", payload)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> Output {
        run(std::iter::once("evasion").chain(args.iter().copied()))
    }

    fn payload(out: &Output) -> Value {
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["schema_version"], 1);
        v["payload"].clone()
    }

    #[test]
    fn rounding() {
        assert_eq!(fmt_num(0.1 + 0.2), "0.3");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(1234567.891234567), "1234567.89123");
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_pair("2,-0.3").unwrap(), (2.0, -0.3));
        assert!(parse_pair("2").is_err());
        assert!(parse_pair("2,nan").is_err());
        assert_eq!(parse_res("40x30").unwrap(), (40, 30));
        assert!(parse_res("0x3").is_err());
        assert!(parse_bounds("1,0,0,1").is_err());
    }

    #[test]
    fn solve_regimes() {
        let out = call(&["solve", "--x0", "2,0.3", "--mu", "0.6", "--T", "2.6"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let p = payload(&out);
        assert_eq!(p["regime"], "constrained");
        assert_eq!(p["phases"].as_array().unwrap().len(), 3);

        let p = payload(&call(&[
            "solve", "--x0", "2,0.3", "--mu", "0.6", "--T", "2.1",
        ]));
        assert_eq!(p["regime"], "unconstrained");

        let p = payload(&call(&[
            "solve", "--x0", "1.05,0", "--mu", "0.7", "--T", "2",
        ]));
        assert_eq!(p["regime"], "capture");
        assert!((p["capture_time"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-3);
    }

    #[test]
    fn reflected_input() {
        let p = payload(&call(&[
            "solve", "--x0", "2,-0.3", "--mu", "0.6", "--T", "2.6",
        ]));
        assert_eq!(p["reflected"], true);
        assert_eq!(p["input"]["x0"][1], 0.3);
    }

    #[test]
    fn usage_errors_exit_2_with_json() {
        for args in [
            vec!["solve", "--x0", "2,0.3", "--mu", "1.5", "--T", "1"],
            vec!["solve", "--x0", "0.5,0", "--mu", "0.6", "--T", "1"],
            vec!["solve", "--mu", "0.6"],
            vec!["nash", "--x0", "1.05,0", "--mu", "0.7"],
            vec![
                "sweep-t", "--x0", "2,0", "--mu", "0.6", "--Tmin", "1", "--Tmax", "0", "--steps",
                "3",
            ],
        ] {
            let out = call(&args);
            assert_eq!(out.code, 2, "{args:?}");
            let v: Value = serde_json::from_str(&out.stderr).unwrap();
            assert!(v["error"]["message"].is_string());
        }
    }

    #[test]
    fn nash_examples() {
        let p = payload(&call(&["nash", "--x0", "2,0.3", "--mu", "0.6"]));
        assert!((p["t_ne"].as_f64().unwrap() - 1.775).abs() < 1e-12);
        assert!((p["value"].as_f64().unwrap() - 1.44).abs() < 1e-12);
        let p = payload(&call(&["nash", "--x0", "0.2,3", "--mu", "0.9"]));
        assert_eq!(p["t_ne"], 0.0);
        assert!((p["value"].as_f64().unwrap() - 0.2f64.hypot(3.0)).abs() < 1e-11);
    }

    #[test]
    fn sweep_endpoints() {
        let out = call(&[
            "sweep-t", "--x0", "2,0.3", "--mu", "0.6", "--Tmin", "0", "--Tmax", "4", "--steps", "2",
        ]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let lines: Vec<&str> = out.stdout.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0,unconstrained,"));
        assert!(lines[2].starts_with("4,constrained,"));
    }

    #[test]
    fn region_cells() {
        let mu = SpeedRatio::new(0.6).unwrap();
        assert_eq!(region_label(1.2, 0.0, mu, 2.0).unwrap(), "capture");
        assert_eq!(region_label(0.2, 0.1, mu, 2.0).unwrap(), "inside");
        for (x, y) in [(-1.0, 1.0), (2.0, 0.3), (3.0, 2.0)] {
            assert_eq!(region_label(x, y, mu, 0.0).unwrap(), "unconstrained");
        }
    }

    #[test]
    fn survival_map_cells() {
        let out = call(&[
            "survival-map",
            "--mu",
            "0.6",
            "--bounds",
            "1.1,1.3,-0.1,0.1",
            "--res",
            "1x1",
        ]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert_eq!(out.stdout, "x,y,t_survive\n1.2,0,0.5\n");
        let out = call(&[
            "survival-map",
            "--mu",
            "0.6",
            "--bounds",
            "1.9,2.1,0.2,0.4",
            "--res",
            "1x1",
        ]);
        assert_eq!(out.stdout, "x,y,t_survive\n2,0.3,\n");
    }

    #[test]
    fn verify_capture_instance_passes() {
        let out = call(&[
            "verify", "--x0", "1.05,0", "--mu", "0.7", "--T", "2", "--grid", "360",
        ]);
        assert_eq!(out.code, 0);
        let p = payload(&out);
        assert_eq!(p["oracle_status"], "no_feasible_policy");
        assert_eq!(p["pass"], true);
    }
}
