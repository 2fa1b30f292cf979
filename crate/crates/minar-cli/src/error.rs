//! Error carrier for the binary, split by exit code.
//!
//! The contract is: `0` success, `1` model or numerical failure, `2` I/O or
//! configuration failure. Argument parsing errors also exit with `2` via
//! clap's default behaviour.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Bad files, malformed data, or invalid configuration (exit code 2).
    Input(String),
    /// Estimation or numerical failure on valid inputs (exit code 1).
    Model(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Model(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) | CliError::Model(msg) => f.write_str(msg),
        }
    }
}

impl std::error::Error for CliError {}

/// Library failures that occur after inputs validated cleanly are model-side.
impl From<minar::Error> for CliError {
    fn from(e: minar::Error) -> Self {
        CliError::Model(e.to_string())
    }
}
