use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its physical or probabilistic domain.
    #[error("parameter `{field}` out of domain: {reason}")]
    Domain { field: &'static str, reason: String },

    /// Caller broke an operation's precondition (lengths, positions, widths).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A received frame does not parse under the expected layout.
    #[error("malformed frame {index}: {reason}")]
    Frame { index: usize, reason: String },

    /// Configuration could not be loaded or validated.
    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn contract(reason: impl Into<String>) -> Self {
        Error::Contract(reason.into())
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
