use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation that needs a nonconstant (or higher degree) polynomial got less.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Root finder did not reach the residual threshold.
    #[error("root finder did not converge after {iterations} iterations (worst residual {worst:.3e})")]
    NonConvergence {
        iterations: usize,
        worst: f64,
        residuals: Vec<f64>,
    },

    /// A triangular solve hit a pivot below the absolute threshold.
    #[error("ill-conditioned solve: pivot {pivot:.3e} at step {step}")]
    IllConditioned { pivot: f64, step: usize },

    /// A mathematical hypothesis was checked numerically and failed.
    #[error("hypothesis failed: {reason} (residual {residual:.3e})")]
    Hypothesis { reason: String, residual: f64 },

    /// A construction has no solution for the requested parameters.
    #[error("unsolvable: {0}")]
    Unsolvable(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn hypothesis(reason: impl Into<String>, residual: f64) -> Self {
        Error::Hypothesis {
            reason: reason.into(),
            residual,
        }
    }

    /// Exit code convention of the command-line tool: 1 for a failed hypothesis,
    /// 2 for numerical or input failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Hypothesis { .. } | Error::Unsolvable(_) => 1,
            _ => 2,
        }
    }
}
