use std::io;

use thiserror::Error;

/// Errors produced by the paint shop library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (length mismatches, bad parameters).
    #[error("invalid input: {0}")]
    Input(String),

    /// An instance or model file could not be parsed or violates an invariant.
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    /// The exact oracle refuses instances above its enumeration cap.
    #[error("too many free cars for exhaustive search: {free} > limit {limit}")]
    Capacity { free: usize, limit: usize },

    /// The operation is not defined for this input (e.g. precision of an all-zero model).
    #[error("undefined for this input: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code for this error: 2 input/parse, 3 capacity, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Input(_) | Error::Parse { .. } | Error::Undefined(_) => 2,
            Error::Capacity { .. } => 3,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
