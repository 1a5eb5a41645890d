//! Command-line harness for the `gaussinv` library: configuration, seeded
//! verification suites and JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

/// Errors that end a command with exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] gaussinv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
