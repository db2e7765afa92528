use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid logits: {0}")]
    InvalidLogits(String),

    #[error("cannot aggregate an empty set of predictions")]
    EmptyAggregation,

    #[error("shape mismatch: expected length {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    #[error("input contains no word tokens")]
    EmptyInput,

    #[error("transform {0} requires a resource that was not loaded")]
    MissingResource(String),

    #[error("invalid document: {0}")]
    InvalidDocument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate training data: {0}")]
    DegenerateData(String),

    #[error("backend unavailable after {completed} of {requested} texts: {reason}")]
    BackendUnavailable {
        completed: usize,
        requested: usize,
        reason: String,
    },

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("malformed {what} at {location}: {reason}")]
    Parse {
        what: &'static str,
        location: String,
        reason: String,
    },

    #[error("invalid model file: {0}")]
    ModelFormat(String),

    #[error("run interrupted after {completed} of {total} policies")]
    Interrupted { completed: usize, total: usize },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(what: &'static str, location: impl ToString, reason: impl ToString) -> Self {
        Error::Parse {
            what,
            location: location.to_string(),
            reason: reason.to_string(),
        }
    }
}
