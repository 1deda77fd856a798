//! Command-line front end: datum files, a content-addressed cache, check
//! suites and JSON-lines reports.

pub use qcb_core as core;

pub mod cache;
pub mod commands;
pub mod datum_file;
pub mod suite;

/// Errors with their process exit codes.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("invalid datum: {0}")]
    Datum(String),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Datum(_) | CliError::Usage(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
