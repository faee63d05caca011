use thiserror::Error;

/// Errors produced by model construction, solvers and the run orchestration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The trace-constrained steady-state solve failed or did not meet its
    /// residual tolerance. Usually means a decoupled or undamped subspace.
    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("steady state violates density-matrix invariants: {0}")]
    InvalidState(String),

    #[error("too few levels: need at least {needed}, found {found}")]
    TooFewLevels { needed: usize, found: usize },

    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("curve too short: need at least {needed} points, found {found}")]
    CurveTooShort { needed: usize, found: usize },

    #[error("fit failed: {0}")]
    FitFailed(String),

    /// Every violation found while validating a run configuration.
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
