use thiserror::Error;

/// Errors raised by the analytic solvers and the simulation oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where an operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A simulation configuration is unusable.
    #[error("invalid simulation config: {0}")]
    Config(String),

    /// Every simulated policy in a sweep ended in capture.
    #[error("no feasible policy: every simulated run was captured")]
    NoFeasiblePolicy,

    /// A bracketing root search was started on an interval without a sign change.
    #[error("root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// Adaptive quadrature hit its subdivision limit before meeting the tolerance.
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
