//! Configuration, report formats and subcommand logic behind the `piqfc`
//! binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use config::PipelineConfig;
pub use error::CliError;
