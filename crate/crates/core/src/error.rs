use thiserror::Error;

/// Errors raised by the numerical kernels and model constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("entry count {got} is not dim^2 for dim {dim}")]
    BadShape { dim: usize, got: usize },

    #[error("matrix is not Hermitian (max |A - A^H| = {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("factor dimensions {factors:?} do not multiply to {dim}")]
    Factorization { factors: Vec<usize>, dim: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("missing decoherence/fidelity entry for pair ({i}, {j})")]
    MissingPair { i: usize, j: usize },

    #[error("projector family is not a complete orthogonal set: {0}")]
    IncompleteProjectors(String),

    #[error("SBS construction is degenerate: every branch success probability vanishes")]
    DegenerateSbs,

    #[error("joint dimension {dim} exceeds the oracle cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
