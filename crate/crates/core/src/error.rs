//! Shared error type and the CLI exit-code mapping.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix entries must be finite")]
    NonFiniteEntries,

    #[error("matrix operation overflowed to non-finite entries; rescale the inputs")]
    Overflow,

    #[error("{op} requires a matrix with strictly positive entries")]
    NotPositive { op: &'static str },

    #[error("closed-form eigenvalues are only available for dim <= 4, got dim {dim}")]
    UnsupportedDimension { dim: usize },

    #[error(
        "power iteration did not converge within {max_iter} iterations (residual {residual:.3e})"
    )]
    NonConvergence { max_iter: usize, residual: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("unknown builtin family '{0}'")]
    UnknownFamily(String),

    #[error("invalid parameter '{name}': {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("word budget exceeded: {needed} words of length {length}, budget {budget}")]
    BudgetExceeded {
        needed: u128,
        length: usize,
        budget: u64,
    },

    #[error("zero product matrix encountered at step {step}; estimate undefined for this word")]
    ZeroProduct { step: usize },

    #[error("all {trials} Monte Carlo trials failed")]
    AllTrialsFailed { trials: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 0 success, 2 input error,
    /// 3 hypothesis refusal, 4 budget exceeded, 5 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::NonFiniteEntries
            | Error::Overflow
            | Error::UnsupportedDimension { .. }
            | Error::InvalidEnsemble(_)
            | Error::UnknownFamily(_)
            | Error::InvalidParam { .. }
            | Error::InvalidInput(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::NotPositive { .. } | Error::HypothesisNotMet(_) => 3,
            Error::BudgetExceeded { .. } => 4,
            Error::NonConvergence { .. } => 5,
            Error::ZeroProduct { .. } | Error::AllTrialsFailed { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
