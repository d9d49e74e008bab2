//! Three-phase optimum: straight entry to the upper tangent point, a ride
//! along the proximity circle, and a tangential straight exit.
//!
//! Also hosts the master [`solve`] dispatch and the regime classifier, since
//! both need every branch.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::capture::{capture_guaranteed, survival_heading, survival_time, GameSpec, RegimeClass};
use crate::error::{domain, Error, Result};
use crate::kinematics::{headings_of_rel_heading, propagate_straight, RelState, SpeedRatio};
use crate::quadrature;
use crate::solution::{ConstraintArc, Phase, StraightSegment, TrajectorySolution};
use crate::unconstrained::{
    intersects_proximity_circle, resolved_optimal_heading, solve_unconstrained, tangent_direction,
};

/// Absolute tolerance for the riding-time quadrature.
pub const ARC_QUAD_TOL: f64 = 1e-11;

/// Gap kept below pi/2 at the top of the exit-angle bracket. The bisection
/// itself runs until the bracket cannot be halved any further.
pub const EXIT_BISECTION_WIDTH: f64 = 1e-12;

/// Lower-bound slack on riding angles, where the riding rate's root term vanishes.
const ANGLE_SLACK: f64 = 1e-12;

/// Starts this close to the circle are treated as already at the tangent point.
const ON_CIRCLE: f64 = 1e-9;

/// Straight entry onto the proximity circle along the upper tangent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentEntry {
    /// Effective heading along the tangent ray.
    pub phi_tan: f64,
    /// Inertial heading realizing `phi_tan` at the higher relative speed.
    pub psi_tan: f64,
    pub t_tan: f64,
    /// Polar angle of the tangent point.
    pub theta_tan: f64,
}

pub fn tangent_entry(x0: RelState, mu: SpeedRatio) -> Result<TangentEntry> {
    let r = x0.norm();
    if r < 1.0 {
        return Err(domain("start state is inside the proximity circle"));
    }
    let phi_tan = tangent_direction(x0);
    let theta_tan = (1.0 / r).acos() + x0.angle();
    if r - 1.0 <= ON_CIRCLE {
        // Already on the circle; the tangent point is the start. When no
        // heading runs along the tangent, fall back to the closest one.
        let m = mu.value();
        let offset = (phi_tan.sin() / m).clamp(-1.0, 1.0).asin();
        return Ok(TangentEntry {
            phi_tan,
            psi_tan: crate::kinematics::wrap_angle(phi_tan - offset),
            t_tan: 0.0,
            theta_tan,
        });
    }
    let fast = headings_of_rel_heading(phi_tan, mu)?.fast;
    let t_tan = (r * r - 1.0).sqrt() / fast.v;
    Ok(TangentEntry {
        phi_tan,
        psi_tan: fast.psi,
        t_tan,
        theta_tan,
    })
}

/// Riding rate `sqrt(mu^2 - cos^2 theta) + sin theta`.
pub fn riding_rate(theta: f64, mu: SpeedRatio) -> f64 {
    let m = mu.value();
    let c = theta.cos();
    (m * m - c * c).max(0.0).sqrt() + theta.sin()
}

/// `integral sqrt(mu^2 - cos^2 theta) dtheta` over `[theta1, theta2]`.
///
/// With `cos theta = mu cos w` the integrand becomes
/// `mu^2 sin^2 w / sqrt(1 - mu^2 cos^2 w)`, which is smooth at the riding
/// threshold `theta = acos(mu)` (`w = 0`).
fn elliptic_part(theta1: f64, theta2: f64, mu: SpeedRatio) -> Result<f64> {
    let m = mu.value();
    let to_w = |theta: f64| (theta.cos() / m).clamp(-1.0, 1.0).acos();
    let m2 = m * m;
    quadrature::integrate(
        |w| {
            let (s, c) = w.sin_cos();
            m2 * s * s / (1.0 - m2 * c * c).sqrt()
        },
        to_w(theta1),
        to_w(theta2),
        ARC_QUAD_TOL,
    )
}

fn check_riding_angles(theta1: f64, theta2: f64, mu: SpeedRatio) -> Result<()> {
    let lo = mu.tangency_heading() - ANGLE_SLACK;
    if !(theta1 >= lo && theta1 <= theta2 && theta2 <= FRAC_PI_2 + ANGLE_SLACK) {
        return Err(domain(format!(
            "riding angles must satisfy acos(mu) <= theta1 <= theta2 <= pi/2, got [{theta1}, {theta2}]"
        )));
    }
    Ok(())
}

/// Time spent riding the circle from `theta1` to `theta2`.
pub fn arc_time(theta1: f64, theta2: f64, mu: SpeedRatio) -> Result<f64> {
    check_riding_angles(theta1, theta2, mu)?;
    if theta1 == theta2 {
        return Ok(0.0);
    }
    let m = mu.value();
    let k = 1.0 - m * m;
    let e = elliptic_part(theta1, theta2, mu)?;
    Ok(((theta1.cos() - theta2.cos()) - e) / k)
}

/// Remaining time after leaving the circle at `theta` for which the
/// unconstrained optimum from that point is tangent to the circle.
pub fn remaining_time_at_exit(theta: f64, mu: SpeedRatio) -> f64 {
    let m = mu.value();
    let (s, c) = theta.sin_cos();
    let g = (m * m - c * c).max(0.0);
    (s * g.sqrt() - g) / ((1.0 - m * m) * c)
}

/// Left-hand side of the tangential-exit condition,
/// `(mu t_r + sqrt(1 + t_r^2 - 2 t_r cos theta)) cos theta - mu`.
pub fn exit_condition_residual(theta: f64, t_r: f64, mu: SpeedRatio) -> f64 {
    let m = mu.value();
    let c = theta.cos();
    (m * t_r + (1.0 + t_r * t_r - 2.0 * t_r * c).max(0.0).sqrt()) * c - m
}

/// The squared form of the exit condition, a cubic in `s = cos theta`.
pub fn exit_cubic(s: f64, t_r: f64, mu: SpeedRatio) -> f64 {
    let m2 = mu.value() * mu.value();
    2.0 * t_r * s.powi(3) - (1.0 + t_r * t_r * (1.0 - m2)) * s * s - 2.0 * m2 * t_r * s + m2
}

/// Exit angle for a ride starting at `theta_tan` with `t_available` left on
/// the clock: the root of `remaining_time_at_exit(theta) + arc_time(theta_tan,
/// theta) = t_available`, found by bisection on the increasing left side.
pub fn exit_angle(t_available: f64, theta_tan: f64, mu: SpeedRatio) -> Result<f64> {
    let acos_mu = mu.tangency_heading();
    if !(theta_tan >= acos_mu - ANGLE_SLACK && theta_tan < FRAC_PI_2) {
        return Err(domain(format!(
            "entry angle {theta_tan} outside [acos(mu), pi/2)"
        )));
    }
    let lo_start = theta_tan.max(acos_mu);
    let residual = |theta: f64| -> Result<f64> {
        Ok(remaining_time_at_exit(theta, mu) + arc_time(theta_tan, theta, mu)? - t_available)
    };
    let mut lo = lo_start;
    let mut hi = FRAC_PI_2 - EXIT_BISECTION_WIDTH;
    let f_lo = residual(lo)?;
    if f_lo >= 0.0 {
        return Err(domain(format!(
            "horizon too short for a constrained solution: {t_available} <= {}",
            f_lo + t_available
        )));
    }
    let f_hi = residual(hi)?;
    if f_hi < 0.0 {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Horizon separating constant-heading optima (`T <= T_c`) from three-phase
/// optima (`T > T_c`).
pub fn critical_time(x0: RelState, mu: SpeedRatio) -> Result<f64> {
    if crate::capture::in_no_escape_zone(x0, mu) {
        return Err(domain(
            "critical time is undefined inside the no-escape zone",
        ));
    }
    if x0.y == 0.0 {
        return Ok(x0.x);
    }
    let entry = tangent_entry(x0, mu)?;
    let (sp, cp) = entry.psi_tan.sin_cos();
    if sp.abs() < 1e-300 {
        return Err(domain(
            "tangent heading is collinear with the pursuer track",
        ));
    }
    let (st, ct) = entry.theta_tan.sin_cos();
    Ok(entry.t_tan + ct - st * cp / sp)
}

/// Regime of an instance: capture check, then the intersection test on the
/// initial unconstrained heading.
pub fn classify(spec: &GameSpec) -> Result<RegimeClass> {
    if capture_guaranteed(spec) {
        return Ok(RegimeClass::GuaranteedCapture {
            survival_time: survival_time(spec.x0, spec.mu)?,
        });
    }
    let (psi, _) = resolved_optimal_heading(0.0, spec.x0, spec.horizon, spec.mu);
    Ok(
        match intersects_proximity_circle(spec.x0, psi, spec.mu, spec.horizon)? {
            Some(_) => RegimeClass::ConstrainedEscape,
            None => RegimeClass::UnconstrainedEscape,
        },
    )
}

fn capture_solution(spec: &GameSpec) -> Result<TrajectorySolution> {
    let ts = survival_time(spec.x0, spec.mu)?;
    let psi = survival_heading(spec.x0, spec.mu)?;
    let end = propagate_straight(spec.x0, psi, spec.mu, ts);
    Ok(TrajectorySolution {
        regime: RegimeClass::GuaranteedCapture { survival_time: ts },
        phases: vec![Phase::Straight(StraightSegment {
            start: spec.x0,
            psi,
            duration: ts,
            end,
        })],
        final_state: end,
        final_distance: end.norm(),
        capture_time: Some(ts),
        nonunique: false,
    })
}

fn constrained_solution(spec: &GameSpec) -> Result<TrajectorySolution> {
    let mu = spec.mu;
    let entry = tangent_entry(spec.x0, mu)?;
    let t_available = spec.horizon - entry.t_tan;
    let theta_exit = if t_available <= remaining_time_at_exit(entry.theta_tan, mu) {
        // Grazing: the horizon sits at the critical time up to rounding.
        entry.theta_tan
    } else {
        exit_angle(t_available, entry.theta_tan, mu)?
    };
    let ride = arc_time(entry.theta_tan, theta_exit, mu)?;
    let t_r = (t_available - ride).max(0.0);
    let exit_point = RelState::on_circle(theta_exit);
    let psi_exit = theta_exit.sin().atan2(theta_exit.cos() - t_r);
    let end = propagate_straight(exit_point, psi_exit, mu, t_r);

    let entry_end = propagate_straight(spec.x0, entry.psi_tan, mu, entry.t_tan);
    Ok(TrajectorySolution {
        regime: RegimeClass::ConstrainedEscape,
        phases: vec![
            Phase::Straight(StraightSegment {
                start: spec.x0,
                psi: entry.psi_tan,
                duration: entry.t_tan,
                end: entry_end,
            }),
            Phase::Arc(ConstraintArc {
                theta_start: entry.theta_tan,
                theta_end: theta_exit,
                duration: ride,
            }),
            Phase::Straight(StraightSegment {
                start: exit_point,
                psi: psi_exit,
                duration: t_r,
                end,
            }),
        ],
        final_state: end,
        final_distance: mu.value() / theta_exit.cos(),
        capture_time: None,
        nonunique: false,
    })
}

/// Optimal evader trajectory for any valid instance.
pub fn solve(spec: &GameSpec) -> Result<TrajectorySolution> {
    if capture_guaranteed(spec) {
        return capture_solution(spec);
    }
    if let Some(sol) = solve_unconstrained(spec)? {
        return Ok(sol);
    }
    constrained_solution(spec)
}

/// Final position of the three-phase optimum in closed form, from the exit
/// angle and the remaining time at exit.
pub fn three_phase_final_state(theta_exit: f64, mu: SpeedRatio) -> RelState {
    let (s, c) = theta_exit.sin_cos();
    let m = mu.value();
    let v = s + (m * m - c * c).max(0.0).sqrt();
    let tr = remaining_time_at_exit(theta_exit, mu);
    RelState::new(c - v * tr * s, s + v * tr * c)
}
