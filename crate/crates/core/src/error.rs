use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input data.
    #[error("input error: {0}")]
    Input(String),

    /// Invalid parameters (filter, band, spread, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// Evaluation could not be carried out (e.g. a single-class dataset).
    #[error("evaluation error: {0}")]
    Eval(String),

    /// A parse failure pinned to a file location.
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    /// Wraps an error with the context it happened in.
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True when the root cause is a configuration problem.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) => true,
            Error::Context { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
