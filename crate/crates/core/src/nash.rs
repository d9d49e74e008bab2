//! Horizon-selection game: the pursuer picks the horizon, the evader its
//! trajectory.

use serde::Serialize;

use crate::capture::in_no_escape_zone;
use crate::error::{domain, Result};
use crate::kinematics::{RelState, SpeedRatio};

/// Equilibrium heading, horizon and the resulting final distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolicyPair {
    pub psi_ne: f64,
    pub t_ne: f64,
    pub value: f64,
}

fn require_escapable(x0: RelState, mu: SpeedRatio) -> Result<()> {
    if in_no_escape_zone(x0, mu) {
        return Err(domain(format!(
            "({}, {}) is inside the no-escape zone; no equilibrium horizon is defined",
            x0.x, x0.y
        )));
    }
    Ok(())
}

/// Horizon minimizing the evader's best-response final distance. This is the
/// leader's choice when the horizon is announced first, and it is also the
/// horizon half of a simultaneous-move equilibrium.
pub fn t_min(x0: RelState, mu: SpeedRatio) -> Result<f64> {
    require_escapable(x0, mu)?;
    let m = mu.value();
    Ok((x0.x - m / mu.complement() * x0.y).max(0.0))
}

pub fn equilibrium(x0: RelState, mu: SpeedRatio) -> Result<PolicyPair> {
    let t_ne = t_min(x0, mu)?;
    let value = if t_ne > 0.0 {
        mu.value() * x0.x + mu.complement() * x0.y
    } else {
        x0.norm()
    };
    Ok(PolicyPair {
        psi_ne: mu.tangency_heading(),
        t_ne,
        value,
    })
}

/// Distance at time `t` when holding the equilibrium heading from `x0`.
pub fn equilibrium_heading_distance(x0: RelState, mu: SpeedRatio, t: f64) -> f64 {
    let m = mu.value();
    let k = 1.0 - m * m;
    let c = x0.x - m / mu.complement() * x0.y;
    (x0.x * x0.x + x0.y * x0.y + k * (t * t - 2.0 * t * c))
        .max(0.0)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capture::{reachable_bound, GameSpec};
    use crate::constrained::solve;
    use crate::kinematics::propagate_straight;

    fn mu(m: f64) -> SpeedRatio {
        SpeedRatio::new(m).unwrap()
    }

    #[test]
    fn t_min_examples() {
        let t = t_min(RelState::new(2.0, 0.3), mu(0.6)).unwrap();
        assert!((t - 1.775).abs() < 1e-14);
        assert_eq!(t_min(RelState::new(2.0, 0.0), mu(0.6)).unwrap(), 2.0);
        assert_eq!(t_min(RelState::new(0.2, 3.0), mu(0.9)).unwrap(), 0.0);
        assert!(t_min(RelState::new(1.05, 0.0), mu(0.7)).is_err());
    }

    #[test]
    fn equilibrium_examples() {
        let m = mu(0.6);
        let p = equilibrium(RelState::new(2.0, 0.3), m).unwrap();
        assert_eq!(p.psi_ne, 0.6f64.acos());
        assert!((p.t_ne - 1.775).abs() < 1e-14);
        assert!((p.value - 1.44).abs() < 1e-14);
        let end = propagate_straight(RelState::new(2.0, 0.3), p.psi_ne, m, p.t_ne);
        assert!((end.norm() - p.value).abs() < 1e-12);

        let x0 = RelState::new(0.2, 3.0);
        let p = equilibrium(x0, mu(0.9)).unwrap();
        assert_eq!(p.t_ne, 0.0);
        assert_eq!(p.value, x0.norm());

        let p = equilibrium(RelState::new(2.0, 0.0), m).unwrap();
        assert!((p.value - 1.2).abs() < 1e-15);
    }

    #[test]
    fn saddle_property() {
        for &(x, y, m) in &[
            (2.0, 0.3, 0.6),
            (3.0, 0.5, 0.4),
            (1.5, 0.9, 0.8),
            (2.0, 0.0, 0.6),
        ] {
            let x0 = RelState::new(x, y);
            let m = mu(m);
            let p = equilibrium(x0, m).unwrap();
            // Heading side: best response to t_ne matches the value.
            let sol = solve(&GameSpec::new(x0, m, p.t_ne).unwrap()).unwrap();
            assert!((sol.final_distance - p.value).abs() < 1e-6);
            // Horizon side: the equilibrium heading's distance bottoms out at t_ne.
            let (best_t, _) = (0..=8000)
                .map(|k| k as f64 * 1e-3)
                .map(|t| (t, equilibrium_heading_distance(x0, m, t)))
                .fold(
                    (0.0, f64::INFINITY),
                    |acc, c| if c.1 < acc.1 { c } else { acc },
                );
            assert!((best_t - p.t_ne).abs() <= 1e-3);
        }
    }

    #[test]
    fn sandwich_bounds() {
        let x0 = RelState::new(2.0, 0.3);
        let m = mu(0.6);
        let tmin = t_min(x0, m).unwrap();
        for k in 1..80 {
            let t = k as f64 * 0.05;
            let d = solve(&GameSpec::new(x0, m, t).unwrap())
                .unwrap()
                .final_distance;
            let lower = equilibrium_heading_distance(x0, m, t);
            let upper = reachable_bound(t, x0, m);
            assert!(lower <= d + 1e-9 && d <= upper + 1e-9, "T = {t}");
        }
        let lower = equilibrium_heading_distance(x0, m, tmin);
        assert!((lower - reachable_bound(tmin, x0, m)).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_heading_never_enters() {
        let m = mu(0.7);
        for &(x, y) in &[(2.0, 0.3), (0.3, 1.2), (-2.0, 0.1), (1.6, 0.0)] {
            let x0 = RelState::new(x, y);
            let p = equilibrium(x0, m).unwrap();
            for k in 0..2000 {
                let t = k as f64 * 2e-3;
                assert!(propagate_straight(x0, p.psi_ne, m, t).norm() >= 1.0 - 1e-12);
            }
        }
    }
}
