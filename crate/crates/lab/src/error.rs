//! Errors raised by configuration handling and run orchestration.

use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a usage or configuration error.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for a numerical domain error.
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("missing required key `{0}`")]
    MissingKey(&'static str),

    #[error("invalid value for `{key}`: {reason}")]
    Value { key: &'static str, reason: String },

    #[error("{path}:{line}: {reason}")]
    Syntax { path: PathBuf, line: usize, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] bgk_core::Error),
}

impl LabError {
    pub fn value(key: &'static str, reason: impl Into<String>) -> Self {
        LabError::Value {
            key,
            reason: reason.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        LabError::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(e) => core_exit_code(e),
            _ => EXIT_USAGE,
        }
    }
}

/// Parameter errors from the core are usage errors; everything else is a domain error.
pub fn core_exit_code(e: &bgk_core::Error) -> i32 {
    match e {
        bgk_core::Error::Parameter { .. } => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}
