use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |A - A^H| = {max_violation:e}")]
    NotHermitian { max_violation: f64 },

    #[error("trace is {trace}, expected 1")]
    InvalidTrace { trace: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },

    #[error("site {index} out of range for a register of {sites} sites")]
    SiteOutOfRange { index: usize, sites: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} exceeds the limit of {limit}; {hint}")]
    Capacity {
        what: String,
        limit: usize,
        hint: &'static str,
    },

    #[error("quadrature did not converge after {panels} panels: estimate {estimate}, error bound {error_bound:e}")]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        panels: usize,
    },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
