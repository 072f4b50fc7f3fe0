//! Command-line front end: configuration files, reports and the
//! subcommands behind the `critline` binary.

pub mod commands;
pub mod config_file;
pub mod error;
pub mod report;

pub use commands::{cmd_bound, cmd_optimize, cmd_oracle, cmd_scan, cmd_verify, OracleArgs, OracleWhat, Outcome};
pub use config_file::RunConfigFile;
pub use error::{CliError, CliResult};
pub use report::RunReport;
