//! Command implementations behind the `dendritic` binary.

pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod metrics;

pub use config::{Calibration, Overrides, RunConfig};
pub use error::CliError;
