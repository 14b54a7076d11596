use thiserror::Error;

use crate::model::Encoding;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("encoding violation: {0}")]
    EncodingViolation(String),

    #[error("invalid objective value {0}")]
    InvalidObjective(f64),

    #[error("member {index} has not been evaluated")]
    Unevaluated { index: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("familiarity row {row} has no positive entry")]
    DegenerateFamiliarity { row: usize },

    #[error("{what} does not support {encoding:?} encoding")]
    IncompatibleEncoding {
        encoding: Encoding,
        what: &'static str,
    },

    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
