//! Config files, parallel simulation and the `ebt` command line.

pub mod cli;
pub mod commands;
pub mod config;
pub mod parallel;
pub mod render;

pub use config::{ConfigError, Experiment, ExperimentConfig, Format};
