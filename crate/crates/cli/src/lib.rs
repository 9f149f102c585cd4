//! Library side of the `textsparql` command: configuration handling and
//! the subcommand implementations, kept separate from argument parsing so
//! tests can drive them directly.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{EndpointConfig, Overrides, RunConfig};
pub use error::{CliError, Failure};
