use std::io;
use std::path::Path;

use thiserror::Error;

/// Front-end failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] bucketwheel::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 validation, 2 numerical failure, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Model(e) if e.is_numerical() => 2,
            CliError::Model(_) => 1,
            CliError::Io { .. } => 3,
        }
    }
}
