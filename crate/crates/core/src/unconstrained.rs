//! Constant-heading optimum for instances where the proximity circle never
//! becomes active, and the straight-line/circle intersection test that
//! decides when it applies.

use std::f64::consts::PI;

use crate::capture::{capture_guaranteed, GameSpec, RegimeClass};
use crate::error::{domain, Result};
use crate::kinematics::{propagate_straight, rel_velocity_of_heading, RelState, SpeedRatio};
use crate::solution::{Phase, StraightSegment, TrajectorySolution};

/// Clamp applied to the chord radicand so grazing rays still report a contact.
const GRAZE_CLAMP: f64 = 1e-12;

/// Below this the virtual point is treated as sitting on the pursuer.
const DEGENERATE_VIRTUAL_POINT: f64 = 1e-12;

/// Optimal unconstrained heading at time `t` from `state`: point at the state
/// drifted by the remaining time, `atan2(y, x - (T - t))`.
pub fn optimal_heading(t: f64, state: RelState, horizon: f64) -> f64 {
    state.y.atan2(state.x - (horizon - t))
}

/// [`optimal_heading`], resolving the case where the virtual point coincides
/// with the pursuer. Every heading is then equally good and `acos(mu)` is
/// returned with the flag set.
pub fn resolved_optimal_heading(
    t: f64,
    state: RelState,
    horizon: f64,
    mu: SpeedRatio,
) -> (f64, bool) {
    let dx = state.x - (horizon - t);
    if state.y == 0.0 && dx.abs() <= DEGENERATE_VIRTUAL_POINT {
        (mu.tangency_heading(), true)
    } else {
        (state.y.atan2(dx), false)
    }
}

/// Upper tangent direction from `x0` to the proximity circle.
pub fn tangent_direction(x0: RelState) -> f64 {
    PI - (1.0 / x0.norm()).asin() + x0.angle()
}

/// Time at which a straight run with heading `psi` first meets the circle,
/// or `None` if it stays outside through the horizon. Touching exactly at the
/// horizon counts as staying outside.
pub fn intersects_proximity_circle(
    x0: RelState,
    psi: f64,
    mu: SpeedRatio,
    horizon: f64,
) -> Result<Option<f64>> {
    let r = x0.norm();
    if r < 1.0 {
        return Err(domain("start state is inside the proximity circle"));
    }
    let m = mu.value();
    let phi_tan = tangent_direction(x0);
    let (s, c) = psi.sin_cos();
    if phi_tan + (m * s).atan2(1.0 - m * c) >= PI {
        return Ok(None);
    }
    let rel = rel_velocity_of_heading(psi, mu);
    let (sp, cp) = rel.phi.sin_cos();
    let along = x0.x * cp + x0.y * sp;
    let across = x0.x * sp - x0.y * cp;
    let mut radicand = 1.0 - across * across;
    if radicand < -GRAZE_CLAMP || along > 0.0 {
        // The ray passes the circle by, or is already moving away.
        return Ok(None);
    }
    radicand = radicand.max(0.0);
    let t_c = ((-along - radicand.sqrt()) / rel.v).max(0.0);
    Ok((horizon > t_c).then_some(t_c))
}

/// Single-segment optimum, or `None` when that segment would cut into the
/// circle and the constrained solver has to take over.
pub fn solve_unconstrained(spec: &GameSpec) -> Result<Option<TrajectorySolution>> {
    if capture_guaranteed(spec) {
        return Err(domain("capture is guaranteed for this instance"));
    }
    let (psi, nonunique) = resolved_optimal_heading(0.0, spec.x0, spec.horizon, spec.mu);
    if intersects_proximity_circle(spec.x0, psi, spec.mu, spec.horizon)?.is_some() {
        return Ok(None);
    }
    let end = propagate_straight(spec.x0, psi, spec.mu, spec.horizon);
    Ok(Some(TrajectorySolution {
        regime: RegimeClass::UnconstrainedEscape,
        phases: vec![Phase::Straight(StraightSegment {
            start: spec.x0,
            psi,
            duration: spec.horizon,
            end,
        })],
        final_state: end,
        final_distance: end.norm(),
        capture_time: None,
        nonunique,
    }))
}
