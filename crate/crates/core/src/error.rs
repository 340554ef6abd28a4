use thiserror::Error;

/// Errors produced by the discretization, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field lives on a different grid (expected {expected}, found {found})")]
    GridMismatch { expected: String, found: String },

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("quadratic form is indefinite on this field (value {value:e}); lambda is below the positivity threshold")]
    IndefiniteForm { value: f64 },

    #[error("zero field has no Nehari projection")]
    ZeroField,

    #[error("banded solve is singular at pivot {pivot}")]
    SingularSolve { pivot: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("quadrature tail too large: {0}")]
    Quadrature(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidGrid(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::Io(_) => 4,
            _ => 3,
        }
    }
}
