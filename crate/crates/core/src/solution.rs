//! Trajectory pieces shared by the solvers.

use serde::Serialize;

use crate::capture::RegimeClass;
use crate::kinematics::RelState;

/// Constant-heading leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StraightSegment {
    pub start: RelState,
    pub psi: f64,
    pub duration: f64,
    pub end: RelState,
}

/// Leg spent riding the proximity circle from `theta_start` to `theta_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstraintArc {
    pub theta_start: f64,
    pub theta_end: f64,
    pub duration: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Phase {
    Straight(StraightSegment),
    Arc(ConstraintArc),
}

impl Phase {
    pub fn duration(&self) -> f64 {
        match self {
            Phase::Straight(s) => s.duration,
            Phase::Arc(a) => a.duration,
        }
    }

    pub fn start_state(&self) -> RelState {
        match self {
            Phase::Straight(s) => s.start,
            Phase::Arc(a) => RelState::on_circle(a.theta_start),
        }
    }

    pub fn end_state(&self) -> RelState {
        match self {
            Phase::Straight(s) => s.end,
            Phase::Arc(a) => RelState::on_circle(a.theta_end),
        }
    }
}

/// Optimal evader trajectory for one instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySolution {
    pub regime: RegimeClass,
    pub phases: Vec<Phase>,
    pub final_state: RelState,
    pub final_distance: f64,
    /// Present only for guaranteed capture; equals the survival time.
    pub capture_time: Option<f64>,
    /// Set when the optimum is one representative of a continuum of optima.
    pub nonunique: bool,
}

impl TrajectorySolution {
    pub fn total_duration(&self) -> f64 {
        self.phases.iter().map(Phase::duration).sum()
    }

    /// Start time of each phase.
    pub fn switch_times(&self) -> Vec<f64> {
        let mut t = 0.0;
        self.phases
            .iter()
            .map(|p| {
                let start = t;
                t += p.duration();
                start
            })
            .collect()
    }

    pub fn arc(&self) -> Option<&ConstraintArc> {
        self.phases.iter().find_map(|p| match p {
            Phase::Arc(a) => Some(a),
            Phase::Straight(_) => None,
        })
    }

    pub fn theta_exit(&self) -> Option<f64> {
        self.arc().map(|a| a.theta_end)
    }

    /// Final straight leg, if any.
    pub fn last_segment(&self) -> Option<&StraightSegment> {
        self.phases.iter().rev().find_map(|p| match p {
            Phase::Straight(s) => Some(s),
            Phase::Arc(_) => None,
        })
    }

    /// Largest gap between the end of one phase and the start of the next.
    pub fn max_chain_gap(&self) -> f64 {
        self.phases
            .windows(2)
            .map(|w| w[0].end_state().distance_to(&w[1].start_state()))
            .fold(0.0, f64::max)
    }
}
