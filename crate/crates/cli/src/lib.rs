//! Library side of the `decaycent` command-line tool: graph file I/O,
//! configuration, report writers and the randomized self-check.

pub mod check;
pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod io;

pub use error::{CliError, CliResult};
