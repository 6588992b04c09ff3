//! Command-line surface for the jmfrac solvers: error tables, ħ-curves and
//! solution surfaces as CSV, plus a validation report.

pub mod commands;
pub mod config;
pub mod validate;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("computation: {0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 2 for bad configuration, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl CliError {
    pub(crate) fn compute(e: impl std::fmt::Display) -> Self {
        CliError::Compute(e.to_string())
    }
}
