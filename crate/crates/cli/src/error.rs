use std::io;
use std::path::{Path, PathBuf};

use mecpath_core::sim::RunStatus;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("configuration error: {0}")]
    Core(#[from] mecpath_core::Error),
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(_) => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
        }
    }
}

pub mod exit {
    use super::RunStatus;

    pub const OK: i32 = 0;
    pub const DIVERGED: i32 = 2;
    pub const SINGULAR: i32 = 3;
    pub const TIMED_OUT: i32 = 4;
    pub const CONFIG: i32 = 64;
    pub const IO: i32 = 74;

    pub fn for_status(s: RunStatus) -> i32 {
        match s {
            RunStatus::Completed => OK,
            RunStatus::Diverged => DIVERGED,
            RunStatus::Singular => SINGULAR,
            RunStatus::TimedOut => TIMED_OUT,
        }
    }
}
