//! Configuration, experiments and CSV output behind the `interpolatron` binary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{parse_config, ExperimentConfig};
pub use error::CliError;
