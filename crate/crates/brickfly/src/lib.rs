//! File formats, configuration and the command-line workflow around
//! `brickfly-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

pub use commands::{compare, navigate, sysid, tune_pd, validate, Outcome, RunOptions};
pub use config::{Axis, ControllerKind, ExperimentConfig, PRESETS};
pub use error::CliError;
