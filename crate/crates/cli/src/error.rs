use std::path::{Path, PathBuf};

use thiserror::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;
pub const EXIT_AMBIGUOUS: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] monogamy_core::Error),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    ResourceCap(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(monogamy_core::Error::ResourceCap { .. }) | Self::ResourceCap(_) => EXIT_RESOURCE,
            Self::Core(monogamy_core::Error::Extrapolation { .. }) => EXIT_VIOLATION,
            Self::Core(_) | Self::Io { .. } | Self::Parse(_) => EXIT_IO,
        }
    }
}
