use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("empty effective domain on grid")]
    EmptyGridDomain,

    #[error("inner solver failed ({method}): {iterations} iterations, residual {residual:e} exceeds {tolerance:e}")]
    InnerSolverFailed {
        method: &'static str,
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("proximal-point iteration {iteration} failed: {source}")]
    ProximalPoint {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown check `{name}`; available: {available}")]
    UnknownCheck { name: String, available: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
