// `!(x > 0.0)` guards reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Config-driven front end: parse a run description, dispatch to the
//! library, and emit CSV reports plus a summary.

use std::fmt;

pub mod config;
pub mod run;

pub use config::{parse_config, Command, RunConfig};
pub use run::{run, RunOutput};

/// CLI-level error. Config and I/O problems exit with status 1, physics
/// errors (no dominant mode, stable spectrum fed to an eigenmode run, ...)
/// with status 2.
#[derive(Debug)]
pub enum CliError {
    Config { line: Option<usize>, msg: String },
    Io(std::io::Error),
    Physics(mhd_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::Physics(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { line: Some(l), msg } => write!(f, "line {l}: {msg}"),
            CliError::Config { line: None, msg } => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Physics(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<mhd_core::Error> for CliError {
    fn from(e: mhd_core::Error) -> Self {
        CliError::Physics(e)
    }
}
