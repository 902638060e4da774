//! Command-line front end: argument parsing, execution and CSV/JSON output.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_args, Command, Format, HamiltonianSpec, RunConfig, SystemSpec, UsageError};
pub use output::{format_number, write_csv, write_json, Cell, Table};
pub use run::{execute, table};
