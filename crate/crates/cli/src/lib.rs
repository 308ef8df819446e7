//! Command implementations and file formats behind the `fmft` binary.
//!
//! Everything the binary does is reachable from here so the integration
//! tests can drive commands in-process as well as through the executable.

pub mod commands;
pub mod formats;
pub mod verify;

use std::fmt;

/// A command failure with a stable machine-parseable kind slug. The
/// binary prints these as `error: <kind>: <message>` on a single line
/// and exits nonzero.
#[derive(Debug)]
pub struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    pub fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for CliError {}

impl From<fmft_core::Error> for CliError {
    fn from(e: fmft_core::Error) -> Self {
        CliError::new("compute", e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new("parse", e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
