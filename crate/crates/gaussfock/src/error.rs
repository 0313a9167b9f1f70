use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} modes, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("mode index {mode} out of range for {modes} modes (1-based)")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("operands live on different Fock spaces ({0} vs {1})")]
    SpecMismatch(String, String),

    #[error("cutoff too small: mode {mode} has |z|^2/d = {ratio:.3e} > 0.5; raise the cutoff")]
    CutoffTooSmall { mode: usize, ratio: f64 },

    #[error("truncation sanity violated: {what} = {value:.3e} exceeds bound {bound:.3e}")]
    TruncationSanity {
        what: &'static str,
        value: f64,
        bound: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not normal (max |AA* - A*A| = {0:.3e})")]
    NotNormal(f64),

    #[error("state is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("limit did not converge: last increment {estimate:.3e}")]
    NonConvergence { estimate: f64 },

    #[error("derivative stencil failed: error estimate {estimate:.3e} exceeds {tolerance:.3e}")]
    StencilFailure { estimate: f64, tolerance: f64 },

    #[error("derivative order {0} exceeds the stencil accuracy limit (6)")]
    OrderTooHigh(usize),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("bad state file: {0}")]
    BadStateFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
