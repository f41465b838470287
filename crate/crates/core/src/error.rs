use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input at a given 1-based line.
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("line {line}: duplicate verse id {id}")]
    DuplicateVerse { line: usize, id: String },

    /// Input data that is well-formed but structurally unusable
    /// (cyclic head chains, bad invariants).
    #[error("invalid data: {0}")]
    Data(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A caller broke a documented precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("statistics undefined: {0}")]
    Undefined(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
