//! Pursuer-fixed frame kinematics.
//!
//! The pursuer sits at the origin and moves along +x at unit speed, so an
//! evader holding inertial heading `psi` at speed `mu` drifts with relative
//! velocity `(mu cos psi - 1, mu sin psi)`. All lengths are in capture-radius
//! units and all times in capture-radius / pursuer-speed units.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};

/// Slack used when testing whether an effective heading is realizable.
const HEADING_SLACK: f64 = 1e-12;

/// Evader position relative to the pursuer.
///
/// Solvers assume `y >= 0`; use [`RelState::to_upper_half`] to reflect
/// lower-half inputs and remember to reflect results back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelState {
    pub x: f64,
    pub y: f64,
}

impl RelState {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Builds a state, rejecting non-finite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(domain(format!("non-finite state ({x}, {y})")));
        }
        Ok(Self { x, y })
    }

    /// Point on the proximity circle at polar angle `theta`.
    pub fn on_circle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle `atan2(y, x)`.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn reflected(&self) -> Self {
        Self::new(self.x, -self.y)
    }

    /// Reflects into `y >= 0`, returning whether a reflection happened.
    pub fn to_upper_half(self) -> (Self, bool) {
        if self.y < 0.0 {
            (self.reflected(), true)
        } else {
            (self, false)
        }
    }

    pub fn distance_to(&self, other: &RelState) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Evader-to-pursuer speed ratio, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct SpeedRatio(f64);

impl SpeedRatio {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(domain(format!("speed ratio must lie in (0, 1), got {mu}")));
        }
        Ok(Self(mu))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `sqrt(1 - mu^2)`.
    #[inline]
    pub fn complement(self) -> f64 {
        (1.0 - self.0 * self.0).sqrt()
    }

    /// Inertial heading `acos(mu)`: the heading whose relative motion is
    /// tangent-most to the left, and the equilibrium heading of the timing game.
    #[inline]
    pub fn tangency_heading(self) -> f64 {
        self.0.acos()
    }
}

/// Effective heading and speed in the pursuer-fixed frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelVelocity {
    pub phi: f64,
    pub v: f64,
}

/// One inertial heading that realizes a requested effective heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeadingBranch {
    pub psi: f64,
    pub v: f64,
}

/// Both inertial headings realizing one effective heading. `fast` has the
/// larger relative speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeadingPair {
    pub fast: HeadingBranch,
    pub slow: HeadingBranch,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

/// Relative velocity vector `(mu cos psi - 1, mu sin psi)`.
#[inline]
pub fn relative_velocity_vector(psi: f64, mu: SpeedRatio) -> (f64, f64) {
    let (s, c) = psi.sin_cos();
    (mu.value() * c - 1.0, mu.value() * s)
}

pub fn rel_velocity_of_heading(psi: f64, mu: SpeedRatio) -> RelVelocity {
    let psi = wrap_angle(psi);
    let m = mu.value();
    let (vx, vy) = relative_velocity_vector(psi, mu);
    RelVelocity {
        phi: vy.atan2(vx),
        v: (1.0 + m * m - 2.0 * m * psi.cos()).sqrt(),
    }
}

/// Inverts [`rel_velocity_of_heading`]: both inertial headings that move the
/// evader along effective heading `phi`.
///
/// At the ends of the admissible interval `pi +/- asin(mu)` the two branches
/// coincide and the double root is returned for both.
pub fn headings_of_rel_heading(phi: f64, mu: SpeedRatio) -> Result<HeadingPair> {
    let m = mu.value();
    let (s, c) = phi.sin_cos();
    if s.abs() > m + HEADING_SLACK || c >= 0.0 {
        return Err(domain(format!(
            "effective heading {phi} is not realizable at speed ratio {m}"
        )));
    }
    let offset = (s / m).clamp(-1.0, 1.0).asin();
    let root = (m * m - s * s).max(0.0).sqrt();
    Ok(HeadingPair {
        fast: HeadingBranch {
            psi: wrap_angle(phi - offset),
            v: -c + root,
        },
        slow: HeadingBranch {
            psi: wrap_angle(phi + offset - PI),
            v: -c - root,
        },
    })
}

/// Closed-form straight-line motion under a constant heading.
pub fn propagate_straight(start: RelState, psi: f64, mu: SpeedRatio, dt: f64) -> RelState {
    let (vx, vy) = relative_velocity_vector(psi, mu);
    RelState::new(start.x + dt * vx, start.y + dt * vy)
}
