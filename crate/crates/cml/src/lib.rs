//! Command-line front end for the cubic moment lab: run configuration,
//! subcommands with CSV output, and the acceptance checklist.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod tolerances;

pub use commands::{run, run_collect, RunOutput};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
