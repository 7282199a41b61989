use std::fmt;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at line {line}, column {col}: {msg}")]
    Config { line: usize, col: usize, msg: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("property failure: {0}")]
    Property(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Property(_) => 1,
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub(crate) fn usage(msg: impl fmt::Display) -> Self {
        CliError::Usage(msg.to_string())
    }
}

impl From<orbit_pressure_core::Error> for CliError {
    fn from(e: orbit_pressure_core::Error) -> Self {
        CliError::Runtime(format!("{}: {e}", e.code()))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(format!("io: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(format!("csv: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;
