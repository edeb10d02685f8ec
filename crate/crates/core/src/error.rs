use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("undefined score: initial index is zero")]
    UndefinedScore,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "solver did not converge after {iterations} iterations \
         (gradient norm {gradient_norm:.3e}, constraint residual {constraint_residual:.3e})"
    )]
    Convergence {
        iterations: usize,
        gradient_norm: f64,
        constraint_residual: f64,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("instance too large for enumeration: {count} candidates exceeds limit {limit}")]
    TooLarge { count: f64, limit: f64 },

    #[error("undefined: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
