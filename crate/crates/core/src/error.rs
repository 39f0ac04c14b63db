use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("malformed artifact: {0}")]
    Format(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Raised when the first argument's support is not contained in the
    /// second's, so the divergence has an infinite (undefined) value.
    #[error("KL undefined: verb {verb} has positive mass in p1 but zero in p2")]
    KlUndefined { verb: u32 },

    #[error("unknown noun: {0}")]
    UnknownNoun(String),

    #[error("unknown verb: {0}")]
    UnknownVerb(String),

    #[error("unknown measure: {0}")]
    UnknownMeasure(String),

    #[error("no usable neighbors: every neighbor weight is zero")]
    NoUsableNeighbors,

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI. Usage errors (exit 2) are produced by
    /// the argument parser before any of these can occur.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Format(_) | Error::Json(_) | Error::UnknownMeasure(_) => 3,
            Error::Io { .. } => 5,
            _ => 4,
        }
    }
}
