use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("symmetry constraint violated: {0}")]
    SymmetryViolated(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("spectrum not admissible: {0}")]
    Spectrum(String),

    #[error("element is not in the group: {0}")]
    NotInGroup(String),

    #[error("quadratic form is not integrable: {0}")]
    NotIntegrable(String),

    #[error("truncation guard exceeded: {0}")]
    Guard(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
