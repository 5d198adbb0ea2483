//! Command-line front end: a JSON run config in, CSV tables and JSON
//! reports out.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

pub use error::{CliError, CliResult};
