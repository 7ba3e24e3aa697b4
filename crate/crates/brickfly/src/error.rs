use std::io;

use brickfly_core::sysid::SysidError;
use brickfly_core::{NavError, PlantError};
use thiserror::Error;

/// Everything that can stop a command, mapped onto the exit-code contract.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("identification failed: {0}")]
    Identification(SysidError),
    #[error("undefined metric: {0}")]
    UndefinedMetric(String),
    #[error("numeric fault: {0}")]
    Numeric(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("csv error on {path}: {source}")]
    Csv { path: String, source: csv::Error },
}

impl CliError {
    pub const EXIT_OK: u8 = 0;
    pub const EXIT_CONFIG: u8 = 2;
    pub const EXIT_IDENTIFICATION: u8 = 3;
    pub const EXIT_UNDEFINED_METRIC: u8 = 4;
    pub const EXIT_MISSION_FAILED: u8 = 5;

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => Self::EXIT_CONFIG,
            CliError::Identification(_) => Self::EXIT_IDENTIFICATION,
            CliError::UndefinedMetric(_) => Self::EXIT_UNDEFINED_METRIC,
            CliError::Numeric(_) | CliError::Io { .. } | CliError::Csv { .. } => 1,
        }
    }

    /// Plant errors raised while building a plant from configuration.
    pub fn from_plant(e: PlantError) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn from_sysid(e: SysidError) -> Self {
        match e {
            SysidError::Config(_) | SysidError::Plant(_) | SysidError::Series(_) => {
                CliError::Config(e.to_string())
            }
            SysidError::UndefinedResult => CliError::UndefinedMetric(e.to_string()),
            SysidError::NoDominantFrequency | SysidError::CrossingNotFound => {
                CliError::Identification(e)
            }
        }
    }

    pub fn from_nav(e: NavError) -> Self {
        match e {
            NavError::NumericFault(_) => CliError::Numeric(e.to_string()),
            NavError::Config(_) | NavError::Plant(_) | NavError::Series(_) => {
                CliError::Config(e.to_string())
            }
        }
    }

    pub fn io(path: &std::path::Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
