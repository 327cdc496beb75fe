//! Configuration schema, file outputs, and the demonstration sampler for
//! the `cubicgate` command-line tool.

pub mod config;
pub mod output;
pub mod sampling;

/// Exit codes: 0 success, 1 runtime error, 2 unknown config key,
/// 3 invalid value or type, 4 missing config file.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn runtime(message: impl Into<String>) -> Self {
        CliError { code: 1, message: message.into() }
    }

    pub fn unknown_key(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    pub fn invalid_value(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }

    pub fn missing_file(message: impl Into<String>) -> Self {
        CliError { code: 4, message: message.into() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl From<cubic_core::SimError> for CliError {
    fn from(err: cubic_core::SimError) -> Self {
        match err {
            cubic_core::SimError::Domain { .. } | cubic_core::SimError::InvalidDimension { .. } => {
                CliError::invalid_value(err.to_string())
            }
            other => CliError::runtime(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
