//! Building blocks of the `subdiv-l1` command-line tool: argument parsing,
//! CSV/OBJ input and output, experiment manifests and the experiment runner.

pub mod args;
pub mod experiment;
pub mod io;
pub mod manifest;

use std::fmt;

/// Error carrying the process exit code it should map to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub source: anyhow::Error,
}

pub const EXIT_NUMERICAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

impl CliError {
    pub fn usage(msg: impl fmt::Display) -> Self {
        CliError { code: EXIT_USAGE, source: anyhow::anyhow!("{msg}") }
    }

    pub fn numerical(msg: impl fmt::Display) -> Self {
        CliError { code: EXIT_NUMERICAL, source: anyhow::anyhow!("{msg}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl std::error::Error for CliError {}

impl From<subdiv_l1::Error> for CliError {
    fn from(e: subdiv_l1::Error) -> Self {
        use subdiv_l1::Error::*;
        let code = match e {
            Singular(_) | Domain(_) => EXIT_NUMERICAL,
            Config(_) | Input(_) | Unsupported(_) => EXIT_USAGE,
        };
        CliError { code, source: e.into() }
    }
}

pub type CliResult<T> = Result<T, CliError>;
