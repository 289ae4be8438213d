use std::path::PathBuf;

use thiserror::Error;

/// Failures of the command-line layer. Each maps to one process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] xlirs::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Invalid(_) => 2,
            Self::Core(xlirs::Error::NoConvergence { .. }) => 3,
            Self::Core(_) => 2,
            Self::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit code for a run whose output is complete except for quantities whose
/// quadrature failed to converge.
pub const EXIT_PARTIAL: i32 = 3;
