//! Error type shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failures surfaced by parsing, numerics and simulation.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series or iteration could not reach the requested accuracy.
    #[error("precision error: {0}")]
    Precision(String),

    /// A matrix or transform is singular at the requested parameters.
    #[error("singular: {0}")]
    Singular(String),

    /// Input sizes disagree (e.g. assignment length vs. variable count).
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// A walk exhausted its step budget before every coordinate froze.
    /// The partial state is retained for diagnosis.
    #[error("walk timed out after {steps} steps with {active} unfrozen coordinates")]
    WalkTimeout {
        steps: u64,
        active: usize,
        state: Vec<f64>,
    },

    /// The low-rank SDP solver failed to meet its tolerances on every restart.
    /// Carries the best iterate found.
    #[error("SDP solver did not converge: {msg}")]
    NoConvergence {
        msg: String,
        best: Box<crate::sdp::SdpSolution>,
    },

    /// The configuration grid produced no admissible rows.
    #[error("empty feasible set: {0}")]
    EmptyFeasibleSet(String),

    /// Baseline rounding exhausted its retry budget.
    #[error("retry cap of {attempts} exceeded: {msg}")]
    RetryCap { attempts: usize, msg: String },
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
