use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{failed} of {total} sweep cells failed")]
    FailedCells { failed: usize, total: usize },

    #[error("{0} property batteries failed")]
    FailedBatteries(usize),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] romilqr::Error),
}

impl CliError {
    /// Process exit status: 3 for configuration problems, 2 for failed
    /// cells or batteries, 1 for anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 3,
            CliError::FailedCells { .. } | CliError::FailedBatteries(_) => 2,
            CliError::Io { .. } | CliError::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
