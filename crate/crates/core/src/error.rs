use thiserror::Error;

/// Errors raised while building or solving a half-space moment system.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A structural property required of the assembled system does not hold.
    #[error("assembly check failed ({clause}): {detail}")]
    Assembly { clause: &'static str, detail: String },

    /// A numerical rank or count contradicts what the block structure implies.
    #[error("numerical inconsistency: {0}")]
    Inconsistency(String),

    #[error("ill-posed boundary condition: {0}")]
    IllPosedBoundary(String),

    /// Boundary data lies outside the range of the boundary operator.
    #[error("inconsistent boundary data: residual {residual:.3e} exceeds {tolerance:.3e}")]
    InconsistentData { residual: f64, tolerance: f64 },

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// Counts of a driver problem differ from the ones the problem is built on.
    #[error("problem configuration error: {0}")]
    Configuration(String),

    #[error("quadrature accuracy: {0}")]
    Accuracy(String),

    #[error("malformed matrix file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
