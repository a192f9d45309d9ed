use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_POSITIVITY: i32 = 2;
pub const EXIT_VERDICT: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{} already exists (use --force to overwrite)", .0.display())]
    OutputExists(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] nicholson_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(nicholson_core::Error::Positivity { .. }) => EXIT_POSITIVITY,
            CliError::Model(nicholson_core::Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
            _ => EXIT_CONFIG,
        }
    }
}
