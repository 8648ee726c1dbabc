use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Core(#[from] tropsec::Error),

    /// Well-formed input that does not fit the requested operation.
    #[error("{0}")]
    Semantic(String),

    /// A reproduction target did not match its expected values.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    /// 0 success, 1 reproduction mismatch, 2 usage or parse, 3 semantic mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Semantic(_) => 3,
            CliError::Core(e) if e.is_semantic() => 3,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
