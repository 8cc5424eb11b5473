use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Core(#[from] cat_tomo::Error),

    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: err.to_string() }
    }

    pub fn exit_code(&self) -> u8 {
        use cat_tomo::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Truncation(_)) => 3,
            CliError::Core(E::SymmetryViolation(_)) => 4,
            CliError::Core(E::Region { .. }) => 5,
            CliError::Io { .. } => 6,
            CliError::Core(_) | CliError::Failed(_) => 1,
        }
    }

    /// Single-line diagnostic.
    pub fn diagnostic(&self) -> String {
        self.to_string().replace('\n', " ")
    }
}
