use std::path::{Path, PathBuf};

use notchwave_sim::SimError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{0}")]
    Core(notchwave_core::Error),

    #[error("{0}")]
    Sim(SimError),
}

impl CliError {
    pub fn config(reason: impl Into<String>) -> Self {
        CliError::Config(reason.into())
    }

    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn format(path: impl AsRef<Path>, reason: impl Into<String>) -> Self {
        CliError::Format { path: path.as_ref().to_path_buf(), reason: reason.into() }
    }

    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) | CliError::Core(notchwave_core::Error::Infeasible { .. }) => "solver",
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Core(_) | CliError::Sim(_) => "invalid-input",
        }
    }

    /// 2 config, 3 solver, 4 file I/O or format, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => 2,
            "solver" => 3,
            "io" | "format" => 4,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}

impl From<notchwave_core::Error> for CliError {
    fn from(e: notchwave_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Core(inner) => CliError::Core(inner),
            other => CliError::Sim(other),
        }
    }
}
