//! Experiment driver: runs a named experiment, writes CSV and SVG output and
//! a checksum manifest.

pub mod config;
pub mod error;
pub mod experiments;
pub mod functions;
pub mod manifest;
pub mod plot;
pub mod run;

pub use config::{ExperimentConfig, ExperimentId, Overrides};
pub use error::CliError;
pub use run::{run_experiment, RunReport};
