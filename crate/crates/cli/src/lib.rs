//! Command-line plumbing for `phs`: configuration parsing, result records,
//! CSV output and the subcommands built on `phs-core`.

pub mod commands;
pub mod config;
pub mod record;
pub mod table;

pub use commands::{run_command, Command, RunError, RunOptions};
pub use config::{parse_config, InitialCondition, ParseError, SimulateConfig, SystemConfig};
pub use record::ResultRecord;
pub use table::{to_csv_string, write_csv, CsvError};
