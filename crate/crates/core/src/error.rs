use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ObserverError>;

#[derive(Debug, Error)]
pub enum ObserverError {
    /// Input violates a documented invariant. The string names the offending field.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("size cap exceeded for {what}: need {required} entries, cap is {cap}{hint}")]
    SizeCap {
        what: &'static str,
        required: u128,
        cap: u128,
        hint: &'static str,
    },

    #[error("periodic question processes have no time-homogeneous kernel; use the unrolled chain")]
    PeriodicProcess,

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl ObserverError {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        ObserverError::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ObserverError::Io {
            path: path.into(),
            source,
        }
    }
}
