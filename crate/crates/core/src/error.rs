use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An input that is structurally valid but numerically degenerate,
    /// e.g. an all-zero database row that cannot be normalized.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An adaptive numerical routine did not reach the requested accuracy.
    #[error("numeric failure in {context}: requested tolerance {requested:e}, achieved {achieved:e}")]
    NumericFailure {
        context: &'static str,
        requested: f64,
        achieved: f64,
    },

    /// A brute-force oracle was asked for a problem size it refuses.
    #[error("size limit exceeded for {context}: {reason}")]
    SizeLimit { context: &'static str, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A file that parses as text but violates the expected format.
    #[error("{path}:{line}: {reason}")]
    Malformed {
        path: String,
        line: usize,
        reason: String,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
