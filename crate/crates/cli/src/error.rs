use std::fmt;

use intermediary_core::Error as CoreError;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum HarnessError {
    /// Invalid configuration; `field` names the offending entry.
    Config { field: String, reason: String },
    /// A computation or output exceeded what this machine can provide.
    Resource(String),
}

impl HarnessError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        HarnessError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } => 2,
            HarnessError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Config { field, reason } => write!(f, "config error in `{field}`: {reason}"),
            HarnessError::Resource(msg) => write!(f, "resource error: {msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<CoreError> for HarnessError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Resource(msg) => HarnessError::Resource(msg),
            CoreError::InvalidParameter { family, reason } => HarnessError::config(family, reason),
            CoreError::InvalidInstance(msg) => HarnessError::config("instance", msg),
            other => HarnessError::config("<input>", other.to_string()),
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Resource(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Resource(e.to_string())
    }
}
