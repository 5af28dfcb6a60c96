use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sobstencil::Error),

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    NodeFile { path: PathBuf, line: usize, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Config { .. } => "config",
            CliError::NodeFile { .. } => "node-file",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Serialize(_) => "serialize",
        }
    }

    /// Exit status: 2 for problems with the caller's inputs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_user_error() => 1,
            CliError::Serialize(_) => 1,
            _ => 2,
        }
    }

    pub fn hint(&self) -> Option<String> {
        match self {
            CliError::Core(sobstencil::Error::PrecisionExhausted { bits, .. }) => {
                Some(format!("rerun with --precision-bits {}", 2 * bits))
            }
            CliError::Core(sobstencil::Error::InfeasibleOrder { .. }) => {
                Some("run `sobstencil qmax` on the node set to find the attainable order".into())
            }
            _ => None,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
