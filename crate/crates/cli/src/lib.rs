//! Command line, file formats and trial runners for `anomedge-core`.
//!
//! Every command is driven by a flat `key = value` configuration. Values
//! come from an optional config file, overridden by command-line flags. Each
//! run writes a `manifest.txt` with the fully resolved configuration.
//! Passing that manifest back as the config file reproduces the run byte for
//! byte.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod trials;

pub use commands::{run, Outcome};
pub use config::{Config, Settings};
pub use error::{CliError, Kind, Result};
