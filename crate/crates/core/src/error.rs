use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (dimensions, missing data, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Mathematically out-of-domain argument (e.g. p < 1 norms, x < -1/e).
    #[error("domain error: {0}")]
    Domain(String),

    /// A row/entry divisor too close to zero; reports which one.
    #[error("near-zero divisor at row {row}: {value:e}")]
    ZeroDivisor { row: usize, value: f64 },

    /// Numerical integration failed (limits exceeded or non-finite state).
    #[error("integration failure: {0}")]
    Integration(String),

    /// An iterative solver did not meet its stopping criterion.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV/JSON parse failure with a 1-based line number where known.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
