//! Forward simulation of the relative dynamics, used to check the analytic
//! solvers from the outside.
//!
//! Nothing here calls into the analytic solver modules. Straight flight is
//! stepped with explicit Euler, which is exact for constant headings, and
//! every step's segment is tested for contact with the proximity circle.
//! While riding the circle the polar angle is advanced with RK4 on
//! `theta' = sqrt(mu^2 - cos^2 theta) + sin theta`.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kinematics::{RelState, SpeedRatio};

pub const DEFAULT_DT: f64 = 1e-4;

/// Closest approaches within this of the circle are not contacts, and riding
/// states are snapped radially onto the circle.
const CONTACT_TOL: f64 = 1e-12;

/// Time slack when deciding whether an event has been reached.
const TIME_EPS: f64 = 1e-13;

/// One knot of a heading schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// Fixed inertial heading.
    Constant(f64),
    /// Heading interpolated linearly between knots and held flat outside them.
    Schedule(Vec<Knot>),
    /// Straight run to the upper tangent point, ride the circle up to
    /// `theta_exit`, then leave along the tangent at full relative speed.
    ThreePhase { theta_exit: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub policy: Policy,
    /// Ride the circle on survivable contact instead of counting it as capture.
    pub ride_on_contact: bool,
}

impl SimConfig {
    pub fn new(policy: Policy) -> Self {
        let ride_on_contact = matches!(policy, Policy::ThreePhase { .. });
        Self {
            dt: DEFAULT_DT,
            policy,
            ride_on_contact,
        }
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn riding(mut self, ride: bool) -> Self {
        self.ride_on_contact = ride;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if let Policy::Schedule(knots) = &self.policy {
            if knots.is_empty() {
                return Err(Error::Config("heading schedule has no knots".into()));
            }
            if knots.windows(2).any(|w| w[1].t < w[0].t) {
                return Err(Error::Config(
                    "heading schedule knots must be time-ordered".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub samples: Vec<(f64, RelState)>,
    pub min_distance: f64,
    pub first_capture_time: Option<f64>,
    pub final_state: RelState,
    pub final_distance: f64,
}

/// Best policy found by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepBest {
    /// Heading (constant sweeps) or exit angle (exit sweeps).
    pub best_param: f64,
    pub best_final_distance: f64,
}

/// Outcome of a constant-heading survival sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurvivalSweep {
    pub best_psi: f64,
    /// Latest first-capture time among captured runs.
    pub best_capture_time: Option<f64>,
    /// Runs never captured within the horizon.
    pub survivors: usize,
}

/// Straight run from the start to the upper tangent point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryLeg {
    pub psi: f64,
    pub duration: f64,
    pub theta: f64,
}

/// `(mu cos psi - 1, mu sin psi)`.
#[inline]
fn drift(psi: f64, m: f64) -> (f64, f64) {
    let (s, c) = psi.sin_cos();
    (m * c - 1.0, m * s)
}

#[inline]
fn ride_rate(theta: f64, m: f64) -> f64 {
    let c = theta.cos();
    (m * m - c * c).max(0.0).sqrt() + theta.sin()
}

fn rk4(theta: f64, h: f64, m: f64) -> f64 {
    let k1 = ride_rate(theta, m);
    let k2 = ride_rate(theta + 0.5 * h * k1, m);
    let k3 = ride_rate(theta + 0.5 * h * k2, m);
    let k4 = ride_rate(theta + h * k3, m);
    theta + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Step length `h' <= h` after which one RK4 step from `theta` lands on `target`.
fn rk4_hit(theta: f64, h: f64, target: f64, m: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if rk4(theta, mid, m) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Heading whose relative motion runs along the unit direction `(ux, uy)` at
/// the larger of the two achievable speeds, with that speed.
fn fast_heading_along(ux: f64, uy: f64, m: f64) -> Option<(f64, f64)> {
    let disc = ux * ux - 1.0 + m * m;
    if disc < -CONTACT_TOL {
        return None;
    }
    let v = -ux + disc.max(0.0).sqrt();
    if v <= 0.0 {
        return None;
    }
    Some(((v * uy).atan2(1.0 + v * ux), v))
}

/// Heading that leaves the circle at `theta` along the counter-clockwise tangent.
pub fn tangent_exit_heading(theta: f64, mu: SpeedRatio) -> Option<(f64, f64)> {
    fast_heading_along(-theta.sin(), theta.cos(), mu.value())
}

/// Straight run to the upper tangent point, built from the tangent-point
/// geometry. `None` when no heading runs along the tangent.
pub fn entry_leg(x0: RelState, mu: SpeedRatio) -> Option<EntryLeg> {
    let r = x0.norm();
    if r <= 1.0 + CONTACT_TOL {
        return Some(EntryLeg {
            psi: 0.0,
            duration: 0.0,
            theta: x0.angle(),
        });
    }
    let (ex, ey) = (x0.x / r, x0.y / r);
    let (nx, ny) = (-ey, ex);
    let along = (r * r - 1.0).sqrt() / r;
    let (px, py) = (ex / r + nx * along, ey / r + ny * along);
    let (dx, dy) = (px - x0.x, py - x0.y);
    let len = dx.hypot(dy);
    let (psi, v) = fast_heading_along(dx / len, dy / len, mu.value())?;
    Some(EntryLeg {
        psi,
        duration: len / v,
        theta: py.atan2(px),
    })
}

/// First parameter `s` in `[0, h]` where `p + s v` enters the circle.
#[inline]
fn first_contact(p: (f64, f64), v: (f64, f64), h: f64) -> Option<f64> {
    let c = p.0 * p.0 + p.1 * p.1 - 1.0;
    let b = p.0 * v.0 + p.1 * v.1;
    if b >= 0.0 {
        return (c < -2.0 * CONTACT_TOL).then_some(0.0);
    }
    let a = v.0 * v.0 + v.1 * v.1;
    let closest = p.0 * p.0 + p.1 * p.1 - b * b / a;
    let limit = (1.0 - CONTACT_TOL) * (1.0 - CONTACT_TOL);
    if closest >= limit {
        return None;
    }
    let disc = (b * b - a * c).max(0.0);
    let s = if c <= 0.0 {
        0.0
    } else {
        c / (-b + disc.sqrt())
    };
    (s <= h).then_some(s)
}

#[derive(Clone, Copy, PartialEq)]
enum Stage {
    Entry,
    Ride,
    Exit,
}

enum Mode {
    Flying(RelState),
    Riding(f64),
}

impl Mode {
    fn state(&self) -> RelState {
        match *self {
            Mode::Flying(p) => p,
            Mode::Riding(theta) => RelState::on_circle(theta),
        }
    }
}

struct Run<'a> {
    m: f64,
    dt: f64,
    horizon: f64,
    policy: &'a Policy,
    ride_on_contact: bool,
    record: bool,
    entry: Option<EntryLeg>,
    exit_psi: f64,
    stage: Stage,
    // Cached drift for the last heading used.
    last_psi: f64,
    last_drift: (f64, f64),
}

impl Run<'_> {
    fn heading_at(&self, t: f64) -> f64 {
        match self.policy {
            Policy::Constant(psi) => *psi,
            Policy::Schedule(knots) => {
                let first = knots[0];
                if t <= first.t {
                    return first.psi;
                }
                for w in knots.windows(2) {
                    if t < w[1].t {
                        let span = w[1].t - w[0].t;
                        let f = if span > 0.0 { (t - w[0].t) / span } else { 1.0 };
                        return w[0].psi + f * (w[1].psi - w[0].psi);
                    }
                }
                knots[knots.len() - 1].psi
            }
            Policy::ThreePhase { .. } => match self.stage {
                Stage::Entry => self.entry.map_or(0.0, |e| e.psi),
                _ => self.exit_psi,
            },
        }
    }

    fn next_event(&self, t: f64) -> f64 {
        let mut next = self.horizon;
        match self.policy {
            Policy::Schedule(knots) => {
                if let Some(k) = knots.iter().find(|k| k.t > t + TIME_EPS) {
                    next = next.min(k.t);
                }
            }
            Policy::ThreePhase { .. } if self.stage == Stage::Entry => {
                if let Some(e) = self.entry {
                    next = next.min(e.duration);
                }
            }
            _ => {}
        }
        next
    }

    fn drift_for(&mut self, psi: f64) -> (f64, f64) {
        if psi != self.last_psi {
            self.last_psi = psi;
            self.last_drift = drift(psi, self.m);
        }
        self.last_drift
    }

    fn survivable(&self, theta: f64) -> bool {
        theta >= self.m.acos() - CONTACT_TOL && theta <= FRAC_PI_2 + CONTACT_TOL
    }

    fn execute(mut self, x0: RelState) -> SimResult {
        let mut samples = Vec::new();
        let mut t = 0.0;
        let mut mode = Mode::Flying(x0);
        let mut capture = None;
        let mut min_distance = x0.norm();
        if self.record {
            samples.push((0.0, x0));
        }
        if let (Policy::ThreePhase { .. }, Some(e)) = (self.policy, self.entry) {
            if e.duration == 0.0 {
                self.stage = Stage::Ride;
                mode = Mode::Riding(e.theta);
            }
        }

        while t < self.horizon - TIME_EPS {
            match mode {
                Mode::Flying(p) => {
                    let psi = self.heading_at(t);
                    let v = self.drift_for(psi);
                    let h = self.dt.min(self.next_event(t) - t).max(0.0);
                    if let Some(s) = first_contact((p.x, p.y), v, h) {
                        let c = RelState::new(p.x + s * v.0, p.y + s * v.1);
                        t += s;
                        let theta = c.angle();
                        if self.ride_on_contact && self.survivable(theta) {
                            mode = Mode::Riding(theta);
                        } else {
                            capture = Some(t);
                            mode = Mode::Flying(c);
                        }
                    } else {
                        mode = Mode::Flying(RelState::new(p.x + h * v.0, p.y + h * v.1));
                        t += h;
                        if self.stage == Stage::Entry {
                            if let (Policy::ThreePhase { .. }, Some(e)) = (self.policy, self.entry)
                            {
                                if t >= e.duration - TIME_EPS {
                                    t = t.max(e.duration);
                                    self.stage = Stage::Ride;
                                    mode = Mode::Riding(e.theta);
                                }
                            }
                        }
                    }
                }
                Mode::Riding(theta) => {
                    let leave = match self.policy {
                        Policy::ThreePhase { theta_exit } => theta >= *theta_exit,
                        _ => {
                            let psi = self.heading_at(t);
                            self.m * (psi - theta).cos() - theta.cos() >= 0.0
                        }
                    };
                    if leave {
                        if let Policy::ThreePhase { .. } = self.policy {
                            self.stage = Stage::Exit;
                            let mu = SpeedRatio::new(self.m).expect("validated speed ratio");
                            self.exit_psi = tangent_exit_heading(theta, mu).map_or(PI, |e| e.0);
                        }
                        mode = Mode::Flying(RelState::on_circle(theta));
                        continue;
                    }
                    let h = self.dt.min(self.next_event(t) - t).max(0.0);
                    let mut next = rk4(theta, h, self.m);
                    let mut step = h;
                    if let Policy::ThreePhase { theta_exit } = self.policy {
                        if next > *theta_exit {
                            step = rk4_hit(theta, h, *theta_exit, self.m);
                            next = *theta_exit;
                        }
                    }
                    t += step;
                    mode = Mode::Riding(next);
                }
            }
            let state = mode.state();
            min_distance = min_distance.min(state.norm());
            if self.record {
                samples.push((t, state));
            }
            if capture.is_some() {
                break;
            }
        }

        let final_state = mode.state();
        SimResult {
            samples,
            min_distance,
            first_capture_time: capture,
            final_state,
            final_distance: final_state.norm(),
        }
    }
}

fn run(
    x0: RelState,
    config: &SimConfig,
    mu: SpeedRatio,
    horizon: f64,
    record: bool,
) -> Result<SimResult> {
    config.validate()?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Config(format!(
            "horizon must be finite and >= 0, got {horizon}"
        )));
    }
    let entry = match config.policy {
        Policy::ThreePhase { .. } => Some(entry_leg(x0, mu).ok_or_else(|| {
            Error::Config("no heading runs along the tangent from this start".into())
        })?),
        _ => None,
    };
    let runner = Run {
        m: mu.value(),
        dt: config.dt,
        horizon,
        policy: &config.policy,
        ride_on_contact: config.ride_on_contact,
        record,
        entry,
        exit_psi: 0.0,
        stage: Stage::Entry,
        last_psi: f64::NAN,
        last_drift: (0.0, 0.0),
    };
    Ok(runner.execute(x0))
}

/// Simulates one policy from `x0` over `[0, horizon]`, recording every step.
pub fn simulate(
    x0: RelState,
    config: &SimConfig,
    mu: SpeedRatio,
    horizon: f64,
) -> Result<SimResult> {
    run(x0, config, mu, horizon, true)
}

fn sweep_headings(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Config(format!(
            "sweep needs at least 2 policies, got {n}"
        )));
    }
    Ok((0..n)
        .map(|k| -PI + 2.0 * PI * (k + 1) as f64 / n as f64)
        .collect())
}

/// Largest feasible final distance over `n` evenly spaced constant headings
/// in `(-pi, pi]`; captured runs are discarded.
pub fn sweep_constant_headings(
    x0: RelState,
    mu: SpeedRatio,
    horizon: f64,
    n: usize,
) -> Result<SweepBest> {
    sweep_constant_headings_with(x0, mu, horizon, n, DEFAULT_DT)
}

pub fn sweep_constant_headings_with(
    x0: RelState,
    mu: SpeedRatio,
    horizon: f64,
    n: usize,
    dt: f64,
) -> Result<SweepBest> {
    let headings = sweep_headings(n)?;
    let finals = headings
        .par_iter()
        .map(|&psi| {
            let cfg = SimConfig::new(Policy::Constant(psi)).with_dt(dt);
            run(x0, &cfg, mu, horizon, false)
                .map(|r| r.first_capture_time.is_none().then_some(r.final_distance))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<SweepBest> = None;
    for (&psi, d) in headings.iter().zip(finals) {
        if let Some(d) = d {
            if best.is_none_or(|b| d > b.best_final_distance) {
                best = Some(SweepBest {
                    best_param: psi,
                    best_final_distance: d,
                });
            }
        }
    }
    best.ok_or(Error::NoFeasiblePolicy)
}

/// Latest first-capture time over `n` constant headings, riding disabled.
pub fn sweep_constant_survival(
    x0: RelState,
    mu: SpeedRatio,
    horizon: f64,
    n: usize,
    dt: f64,
) -> Result<SurvivalSweep> {
    let headings = sweep_headings(n)?;
    let captures = headings
        .par_iter()
        .map(|&psi| {
            let cfg = SimConfig::new(Policy::Constant(psi)).with_dt(dt);
            run(x0, &cfg, mu, horizon, false).map(|r| r.first_capture_time)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SurvivalSweep {
        best_psi: headings[0],
        best_capture_time: None,
        survivors: 0,
    };
    for (&psi, c) in headings.iter().zip(captures) {
        match c {
            None => out.survivors += 1,
            Some(tc) => {
                if out.best_capture_time.is_none_or(|b| tc > b) {
                    out.best_capture_time = Some(tc);
                    out.best_psi = psi;
                }
            }
        }
    }
    Ok(out)
}

/// Time to ride from `theta1` to `theta2` by RK4 with step `dt`.
pub fn ride_time(theta1: f64, theta2: f64, mu: SpeedRatio, dt: f64) -> f64 {
    let m = mu.value();
    let mut theta = theta1;
    let mut t = 0.0;
    while theta < theta2 {
        let next = rk4(theta, dt, m);
        if next >= theta2 {
            return t + rk4_hit(theta, dt, theta2, m);
        }
        theta = next;
        t += dt;
    }
    t
}

/// Best three-phase policy over `n` exit angles evenly spaced on
/// `[theta_tan, pi/2)`.
///
/// All candidates share the entry leg and the ride, so the ride is integrated
/// once and each candidate branches off it; the tangential exit leg has a
/// constant heading, so its Euler steps collapse to one exact step.
pub fn sweep_exit_angles(
    x0: RelState,
    mu: SpeedRatio,
    horizon: f64,
    n: usize,
) -> Result<SweepBest> {
    sweep_exit_angles_with(x0, mu, horizon, n, DEFAULT_DT)
}

pub fn sweep_exit_angles_with(
    x0: RelState,
    mu: SpeedRatio,
    horizon: f64,
    n: usize,
    dt: f64,
) -> Result<SweepBest> {
    if n < 2 {
        return Err(Error::Config(format!(
            "sweep needs at least 2 policies, got {n}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let m = mu.value();
    let entry = entry_leg(x0, mu).ok_or(Error::NoFeasiblePolicy)?;
    if entry.theta < m.acos() - CONTACT_TOL || entry.theta >= FRAC_PI_2 {
        return Err(Error::NoFeasiblePolicy);
    }
    if horizon <= entry.duration {
        let (vx, vy) = drift(entry.psi, m);
        let end = RelState::new(x0.x + horizon * vx, x0.y + horizon * vy);
        return Ok(SweepBest {
            best_param: entry.theta,
            best_final_distance: end.norm(),
        });
    }

    // Ride from the tangent point, recording (t, theta) at step boundaries.
    let mut ride = vec![(entry.duration, entry.theta)];
    let (mut t, mut theta) = (entry.duration, entry.theta);
    while theta < FRAC_PI_2 && t < horizon - TIME_EPS {
        let h = dt.min(horizon - t);
        theta = rk4(theta, h, m);
        t += h;
        ride.push((t, theta));
    }

    let mut best: Option<SweepBest> = None;
    for k in 0..n {
        let target = entry.theta + (FRAC_PI_2 - entry.theta) * k as f64 / n as f64;
        // First recorded point at or beyond the target.
        let idx = ride.partition_point(|&(_, th)| th < target);
        let distance = if idx == ride.len() {
            1.0
        } else {
            let t_hit = if idx == 0 {
                ride[0].0
            } else {
                let (t0, th0) = ride[idx - 1];
                t0 + rk4_hit(th0, ride[idx].0 - t0, target, m)
            };
            let rest = (horizon - t_hit).max(0.0);
            match tangent_exit_heading(target, mu) {
                Some((psi, _)) => {
                    let (vx, vy) = drift(psi, m);
                    let (s, c) = target.sin_cos();
                    (c + rest * vx).hypot(s + rest * vy)
                }
                None => continue,
            }
        };
        if best.is_none_or(|b| distance > b.best_final_distance) {
            best = Some(SweepBest {
                best_param: target,
                best_final_distance: distance,
            });
        }
    }
    best.ok_or(Error::NoFeasiblePolicy)
}
