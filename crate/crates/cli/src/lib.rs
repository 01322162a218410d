//! Command-line front end: argument parsers, subcommands and sweep output.

pub mod args;
pub mod commands;
pub mod parse;
pub mod sweep;

pub use args::Cli;
pub use commands::{run, CliError, Report};
