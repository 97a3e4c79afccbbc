use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GnwError {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A request would exceed a fixed resource budget (enumeration size, edge count).
    #[error("resource limit: {0}")]
    Resource(String),

    /// Numerical integration did not reach the requested accuracy.
    #[error("numeric failure: {message} (estimate {estimate}, error {error})")]
    Numeric {
        message: String,
        estimate: f64,
        error: f64,
    },

    /// Scenario configuration could not be parsed or validated.
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GnwError>;

pub(crate) fn invalid(msg: impl Into<String>) -> GnwError {
    GnwError::InvalidInput(msg.into())
}
