use std::path::PathBuf;

use spherecert_core::region::HyperplaneId;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const ON_BOUNDARY: i32 = 2;
    pub const UNSOUND: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed {what}: {source}")]
    Parse {
        what: &'static str,
        source: serde_json::Error,
    },

    #[error("invalid argument: {0}")]
    Usage(String),

    #[error("point lies on hyperplane {0}: margin is zero")]
    OnBoundary(HyperplaneId),

    #[error(transparent)]
    Core(spherecert_core::Error),
}

impl From<spherecert_core::Error> for CliError {
    fn from(e: spherecert_core::Error) -> Self {
        match e {
            spherecert_core::Error::OnBoundary(id) => CliError::OnBoundary(id),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::OnBoundary(_) => exit::ON_BOUNDARY,
            _ => exit::INPUT,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Read { .. } | CliError::Write { .. } | CliError::Io(_) => "io",
            CliError::Parse { .. } => "parse",
            CliError::Usage(_) => "usage",
            CliError::OnBoundary(_) => "on_boundary",
            CliError::Core(_) => "input",
        }
    }
}
