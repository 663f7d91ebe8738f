use thiserror::Error;

/// Errors produced by instance construction, transformations, solvers and checkers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed instance, assignment or graph.
    #[error("validation error: {0}")]
    Validation(String),

    /// A value operation was requested on an instance without edges.
    #[error("degenerate instance: {0}")]
    Degenerate(String),

    /// Out-of-range or inconsistent numeric parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Input violates an operation's structural precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Exact solver or enumerator refused an input above its configured cap.
    #[error("size limit exceeded: {what} has size {size}, cap is {cap}")]
    SizeLimit { what: String, size: u128, cap: u128 },

    /// Graph shape unsuitable for the requested operation (non-regular, disconnected, ...).
    #[error("structure error: {0}")]
    Structure(String),

    /// Randomized construction gave up.
    #[error("construction failed: {0}")]
    Construction(String),

    /// Numeric domain violation for a closed-form evaluator.
    #[error("domain error: {0}")]
    Domain(String),

    /// Schema or syntax error while parsing JSON input.
    #[error("parse error: {0}")]
    Parse(String),

    /// An internal invariant was broken; carries diagnostic data.
    #[error("internal invariant violated: {message}")]
    Internal { message: String, residual: Vec<f64> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse(err.to_string())
    }
}
