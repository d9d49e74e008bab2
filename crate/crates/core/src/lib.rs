//! Optimal evasion from a pursuer that moves in a straight line at unit speed
//! and captures anything entering its unit-radius proximity circle.
//!
//! Everything is expressed in the pursuer-fixed frame (see [`kinematics`]).
//! [`solve`] dispatches between guaranteed capture, the constant-heading
//! optimum, and the three-phase entry/ride/exit optimum. [`nash`] covers the
//! game where the pursuer also picks the horizon, and [`oracle`] holds a
//! time-stepping simulator used to check the analytic results.

pub mod capture;
pub mod cli;
pub mod constrained;
pub mod error;
pub mod kinematics;
pub mod nash;
pub mod oracle;
pub mod quadrature;
pub mod solution;
pub mod unconstrained;

pub use capture::{GameSpec, RegimeClass};
pub use constrained::{classify, solve};
pub use error::{Error, Result};
pub use kinematics::{RelState, RelVelocity, SpeedRatio};
pub use nash::PolicyPair;
pub use solution::{ConstraintArc, Phase, StraightSegment, TrajectorySolution};
