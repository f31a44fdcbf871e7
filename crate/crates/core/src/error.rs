use thiserror::Error;

/// Errors raised by state construction, protocol execution and the runners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {mode} out of range for a {modes}-mode state")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("mode index {0} listed more than once")]
    DuplicateMode(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis size {size} exceeds the configured cap of {cap} terms")]
    BasisCapExceeded { size: usize, cap: usize },

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid qubit amplitudes: {0}")]
    InvalidQubit(String),

    #[error("branch k = {0} has zero probability")]
    ZeroProbabilityBranch(usize),

    #[error("residual registers do not factor out (max cross term {0:e})")]
    ResidualNotFactorized(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
