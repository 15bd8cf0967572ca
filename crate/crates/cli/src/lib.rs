//! Config-driven front end for the `hqc` binary.
//!
//! [`parse_config`] turns a JSON experiment description into an
//! [`ExperimentConfig`]; [`execute`] runs it and writes CSV/JSON artifacts.

pub mod config;
pub mod error;
pub mod quantity;
pub mod runner;

pub use config::{parse_config, Experiment, ExperimentConfig, LoopMap, Overrides};
pub use error::CliError;
pub use runner::{execute, holonomy_only, scan, simulate, Command, HolonomyOutcome, HolonomyReport, RunOutcome};

use std::path::Path;

/// Reads and parses a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Config {
        path: String::new(),
        message: format!("cannot read {}: {source}", path.display()),
    })?;
    parse_config(&text)
}
