//! Command-line experiments for the dispersion-managed NLS toolkit.

pub mod cli;
pub mod config;
pub mod manifest;
pub mod report;
pub mod scenarios;
pub mod snapshot;

pub use cli::{exit_code, run_from_args, Cli, Command};
