use std::fmt;

use rsw_core::Error as CoreError;

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Every problem found in the configuration.
    Config(Vec<String>),
    /// A computation produced or detected invalid numbers.
    Numeric(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(issues) => {
                writeln!(f, "invalid configuration:")?;
                for issue in issues {
                    writeln!(f, "  - {issue}")?;
                }
                Ok(())
            }
            CliError::Numeric(msg) => write!(f, "numeric error: {msg}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::TooFewSites(_)
            | CoreError::UnsupportedDimension(_)
            | CoreError::InvalidParameter { .. }
            | CoreError::NonConvergentImageSum { .. }
            | CoreError::InvalidBipartition { .. }
            | CoreError::SiteOutOfRange { .. }
            | CoreError::NonMonotoneTimeGrid
            | CoreError::SizeCapExceeded { .. }
            | CoreError::UnsupportedSpin => CliError::Config(vec![e.to_string()]),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}
