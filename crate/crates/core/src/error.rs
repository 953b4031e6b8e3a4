use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigenvalue iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("spectral radius is zero")]
    ZeroRadius,

    #[error("dominant eigenvalue is not simple (gap {gap:e})")]
    NonSimple { gap: f64 },

    #[error("spectrum is not real")]
    ComplexSpectrum,

    #[error("strategy is not disconnecting")]
    NotDisconnecting,

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("solver stalled: {0}")]
    SolverStall(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
