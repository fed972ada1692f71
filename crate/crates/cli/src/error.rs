use std::fmt;

use eosl_core::io::IoError;
use eosl_core::{EoslError, MetaError, SelectionError};

/// A failed command; the variant decides the exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input that violates a documented constraint.
    Invalid(String),
    /// Input was well formed but could not be processed, or output failed.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Parse { .. } | IoError::SchemaViolation { .. } | IoError::MissingFile(_) => {
                CliError::Invalid(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<SelectionError> for CliError {
    fn from(e: SelectionError) -> Self {
        match e {
            SelectionError::InvalidRounds(_)
            | SelectionError::ManifestTooSmall { .. }
            | SelectionError::InvalidSweep(_)
            | SelectionError::EmptyItemSet => CliError::Invalid(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<MetaError> for CliError {
    fn from(e: MetaError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<EoslError> for CliError {
    fn from(e: EoslError) -> Self {
        CliError::Invalid(e.to_string())
    }
}
