use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    MissingFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {key}: {msg}")]
    Config { line: usize, key: String, msg: String },
    #[error("config: {0}")]
    Invalid(String),
    #[error("{op} failed: {source}")]
    Numerical {
        op: &'static str,
        #[source]
        source: eit_forge::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingFile { .. } | CliError::Write { .. } => 1,
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Numerical { .. } => 3,
        }
    }
}

/// Tags a core error with the operation that produced it.
pub(crate) trait Context<T> {
    fn during(self, op: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for eit_forge::Result<T> {
    fn during(self, op: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numerical { op, source })
    }
}
