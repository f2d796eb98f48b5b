use std::fmt;
use std::process::ExitCode;

use qinvert_core::Error;

/// What went wrong, grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or inconsistent configuration (exit 2).
    Config(String),
    /// The engine rejected the input (exit 3).
    Domain(Error),
    /// A result failed a check that should hold unconditionally (exit 4).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(msg) => CliError::Config(msg),
            Error::Assertion(msg) => CliError::Internal(msg),
            other => CliError::Domain(other),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "ConfigError: {msg}"),
            CliError::Domain(e) => write!(f, "{}: {e}", e.name()),
            CliError::Internal(msg) => write!(f, "InternalError: {msg}"),
        }
    }
}
