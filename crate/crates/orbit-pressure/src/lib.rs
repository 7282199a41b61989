//! Command-line front end for `orbit-pressure-core`.
//!
//! Runs are described by a plain-text config (see [`config`]) and/or flags,
//! resolved into a [`config::RunSpec`] with every default filled in, executed
//! by [`commands::execute`], and rendered as CSV or JSON by [`output`].
//!
//! Exit codes: 0 ok, 1 property failure, 2 config or usage error, 3 runtime error.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod verify;

pub use cli::run;
pub use error::{CliError, CliResult};
