use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian (||M - M^dagger||_F = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not skew-Hermitian (||M + M^dagger||_F = {deviation:e})")]
    NotSkewHermitian { deviation: f64 },

    #[error("qubit site {site} out of range 1..={n_qubits}")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("invalid qubit count {0}: {1}")]
    InvalidQubitCount(usize, &'static str),

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("Lie closure did not stabilize within depth {depth} (dimension so far {dim})")]
    LieClosureNotConverged { depth: usize, dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dims(rows: usize, cols: usize) -> String {
    format!("{rows}x{cols}")
}
