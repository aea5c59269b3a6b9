use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (shape mismatch, ordering, bad index).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input is well-formed but degenerate for the operation (zero vector, empty mask).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Persisted data failed structural checks.
    #[error("corrupt data: {0}")]
    Corrupt(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// Predicted and ground-truth masklets could not be paired by instance id.
    #[error("alignment error: unmatched prediction ids {unmatched_pred:?}, unmatched ground-truth ids {unmatched_gt:?}")]
    Alignment {
        unmatched_pred: Vec<u32>,
        unmatched_gt: Vec<u32>,
    },

    #[error("training diverged at step {step}: {reason}")]
    Training { step: usize, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
