use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        #[source]
        source: mscd_core::Error,
    },

    #[error(transparent)]
    Core(#[from] mscd_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { path, source }
    }

    pub fn input(path: impl Into<PathBuf>) -> impl FnOnce(mscd_core::Error) -> Self {
        let path = path.into();
        move |source| Self::Input { path, source }
    }

    /// 2 for bad usage or invalid input, 3 for failures while running.
    pub fn exit_code(&self) -> i32 {
        use mscd_core::Error as E;
        match self {
            Self::Usage(_) | Self::Input { .. } => 2,
            Self::Core(E::InvalidParameter(_) | E::Parse { .. } | E::EmptyInput | E::UnknownLabel(_)) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
