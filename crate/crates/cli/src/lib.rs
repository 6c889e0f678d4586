//! Claim-severity ingestion, synthetic portfolio simulation and report
//! writing for the `tailrisk` CLI. The statistics live in `tailrisk-core`;
//! this crate owns files, formats and process plumbing.

pub mod portfolio;
pub mod report;
pub mod simulate;

use std::fmt;

/// CLI-level errors carrying the process exit code policy:
/// usage errors exit 2, data errors 3, non-convergence 4.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<tailrisk_core::Error> for CliError {
    fn from(e: tailrisk_core::Error) -> Self {
        match e {
            tailrisk_core::Error::NonConvergence(_) => CliError::NonConvergence(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
