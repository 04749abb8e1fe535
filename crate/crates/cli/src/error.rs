use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of a CLI run, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{}: {source}", path.display())]
    Input {
        path: PathBuf,
        source: eulerist::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("validation failed:\n{0}")]
    Validation(String),

    #[error(transparent)]
    Core(#[from] eulerist::Error),
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

fn core_exit_code(e: &eulerist::Error) -> i32 {
    use eulerist::Error as E;
    match e {
        E::Parse { .. }
        | E::UnknownKernel(_)
        | E::InvalidArgument(_)
        | E::DimensionMismatch { .. }
        | E::Io(_) => EXIT_USAGE,
        E::Numeric(_) | E::TooLarge(_) => EXIT_NUMERIC,
        _ => EXIT_VALIDATION,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Input { source, .. } | CliError::Core(source) => core_exit_code(source),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn input(path: &Path, source: eulerist::Error) -> Self {
        CliError::Input {
            path: path.to_path_buf(),
            source,
        }
    }
}
