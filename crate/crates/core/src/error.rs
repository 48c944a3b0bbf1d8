//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A text input could not be parsed; `line` is 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Inputs parsed but violate a structural requirement (bad ids, count
    /// mismatches, broken invariants).
    #[error("structural error: {0}")]
    Structural(String),

    /// An argument is outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Corpus generation exhausted its draw budget.
    #[error("generation error: {0}")]
    Generation(String),

    /// A checkpoint or container file is malformed.
    #[error("format error: {0}")]
    Format(String),

    /// Training produced a non-finite loss; aborted.
    #[error("non-finite loss at epoch {epoch}, route {route}")]
    NonFiniteLoss { epoch: usize, route: usize },

    /// An optimizer update was rejected because a gradient is non-finite.
    #[error("non-finite gradient for parameter `{param}`")]
    NonFiniteGrad { param: String },

    /// A numeric oracle sampled a non-finite value.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numeric kind (training aborts), as opposed
    /// to usage, format, or I/O problems.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonFiniteLoss { .. } | Error::NonFiniteGrad { .. } | Error::NonFinite(_)
        )
    }
}
