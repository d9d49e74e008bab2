//! No-escape zone, guaranteed capture, and maximum survival time.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::kinematics::{RelState, SpeedRatio};

/// A full problem instance: start state, speed ratio and horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GameSpec {
    pub x0: RelState,
    pub mu: SpeedRatio,
    pub horizon: f64,
}

impl GameSpec {
    /// Validates an instance. The start must be on or outside the proximity
    /// circle and in the upper half plane.
    pub fn new(x0: RelState, mu: SpeedRatio, horizon: f64) -> Result<Self> {
        let x0 = RelState::try_new(x0.x, x0.y)?;
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(domain(format!(
                "horizon must be finite and >= 0, got {horizon}"
            )));
        }
        if x0.y < 0.0 {
            return Err(domain("start state must have y >= 0; reflect it first"));
        }
        if x0.norm() < 1.0 {
            return Err(domain(format!(
                "start state ({}, {}) is inside the proximity circle",
                x0.x, x0.y
            )));
        }
        Ok(Self { x0, mu, horizon })
    }

    /// Like [`GameSpec::new`] but reflects `y < 0` starts into the upper half
    /// plane, reporting whether it did.
    pub fn normalized(x0: RelState, mu: SpeedRatio, horizon: f64) -> Result<(Self, bool)> {
        let (upper, reflected) = x0.to_upper_half();
        Ok((Self::new(upper, mu, horizon)?, reflected))
    }
}

/// Which of the three start-state regions an instance falls into.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum RegimeClass {
    GuaranteedCapture { survival_time: f64 },
    UnconstrainedEscape,
    ConstrainedEscape,
}

impl RegimeClass {
    /// Short label used in CLI output.
    pub fn label(&self) -> &'static str {
        match self {
            RegimeClass::GuaranteedCapture { .. } => "capture",
            RegimeClass::UnconstrainedEscape => "unconstrained",
            RegimeClass::ConstrainedEscape => "constrained",
        }
    }

    pub fn survival_time(&self) -> Option<f64> {
        match *self {
            RegimeClass::GuaranteedCapture { survival_time } => Some(survival_time),
            _ => None,
        }
    }
}

/// Membership in the no-escape zone: below the tangent line at `acos(mu)`
/// and right of `x = mu`. Boundary points count as escapable.
pub fn in_no_escape_zone(x0: RelState, mu: SpeedRatio) -> bool {
    let m = mu.value();
    m * x0.x + mu.complement() * x0.y < 1.0 && x0.x > m
}

/// Longest time an evader starting in the no-escape zone can stay outside
/// the proximity circle.
///
/// This is the smaller root of
/// `(1 - mu^2) t^2 - 2 (x0 - mu) t + |x0|^2 - 1 = 0`, evaluated in the
/// conjugate form so that starts near the circle do not cancel.
pub fn survival_time(x0: RelState, mu: SpeedRatio) -> Result<f64> {
    if x0.norm() < 1.0 {
        return Err(domain("start state is inside the proximity circle"));
    }
    if !in_no_escape_zone(x0, mu) {
        return Err(domain(format!(
            "({}, {}) is outside the no-escape zone; survival time is unbounded",
            x0.x, x0.y
        )));
    }
    let m = mu.value();
    let b = x0.x - m;
    let disc = ((1.0 - m * x0.x).powi(2) - (1.0 - m * m) * x0.y * x0.y).max(0.0);
    let c = x0.x * x0.x + x0.y * x0.y - 1.0;
    Ok((c / (b + disc.sqrt())).max(0.0))
}

/// Constant heading that keeps the evader outside the circle for exactly
/// [`survival_time`]: aimed at the far side of the reachable disc of that
/// duration.
pub fn survival_heading(x0: RelState, mu: SpeedRatio) -> Result<f64> {
    let ts = survival_time(x0, mu)?;
    let scale = 1.0 - mu.value() * ts;
    let cos_psi = (x0.x - ts) / scale;
    let sin_psi = x0.y / scale;
    Ok(sin_psi.atan2(cos_psi))
}

/// Capture is unavoidable iff the start is in the no-escape zone and the
/// horizon outlasts the survival time.
pub fn capture_guaranteed(spec: &GameSpec) -> bool {
    in_no_escape_zone(spec.x0, spec.mu)
        && survival_time(spec.x0, spec.mu).is_ok_and(|ts| spec.horizon > ts)
}

/// Whether an evader sitting on the circle at `theta` is necessarily pulled
/// inside. The boundary `|theta| = acos(mu)` is survivable.
pub fn circle_point_capturable(theta: f64, mu: SpeedRatio) -> bool {
    theta.abs() < mu.tangency_heading()
}

/// Distance of the farthest point of the time-`t` reachable disc from the
/// pursuer.
pub fn reachable_bound(t: f64, x0: RelState, mu: SpeedRatio) -> f64 {
    (x0.x - t).hypot(x0.y) + mu.value() * t
}

/// Heading `acos(mu)` keeps the evader outside the circle forever whenever the
/// start is escapable; this is its state at time `t`.
pub fn escape_heading_state(x0: RelState, mu: SpeedRatio, t: f64) -> RelState {
    let m = mu.value();
    RelState::new(x0.x + (m * m - 1.0) * t, x0.y + m * mu.complement() * t)
}
