//! Command-line front end for the `ccr` library.

pub mod commands;
pub mod config;
pub mod csv;
pub mod parse;
pub mod verify;

use thiserror::Error;

/// Failures mapped onto the process exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) | CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
        }
    }
}

impl From<parse::ParseError> for CliError {
    fn from(e: parse::ParseError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ccr::propagator::PropagatorError> for CliError {
    fn from(e: ccr::propagator::PropagatorError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ccr::pathint::PathIntegralError> for CliError {
    fn from(e: ccr::pathint::PathIntegralError) -> Self {
        CliError::Domain(e.to_string())
    }
}
