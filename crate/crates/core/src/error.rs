use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    /// Bad magic, unsupported version or otherwise malformed file header.
    #[error("format error: {0}")]
    Format(String),
    /// Payload shorter or longer than the header declares.
    #[error("corrupt payload: {0}")]
    Corruption(String),
    #[error("validation error: {0}")]
    Validation(String),
    /// Input outside the mathematical domain of an operation (zero-norm vectors, single cluster).
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code: 1 for validation-class errors, 2 for I/O and format errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Format(_) | Error::Corruption(_) => 2,
            Error::Validation(_) | Error::Domain(_) | Error::DimMismatch { .. } => 1,
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Format(format!("{other:?}")),
        }
    }
}
