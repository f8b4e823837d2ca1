//! Scenario files and subcommands for the `credal` tool.

pub mod commands;
pub mod error;
mod locate;
pub mod parse;
pub mod scenario;

pub use commands::{run, run_on, Cli, Command, Format, Report, SCHEMA_VERSION};
pub use error::{CliError, CliResult};
pub use scenario::{load_scenario, parse_scenario, CredalSpec, Scenario};
