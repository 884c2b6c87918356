use std::path::Path;
use std::process::ExitCode;

/// A fatal error, classified by the exit status it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A required input is absent. Exit status 2.
    #[error("missing input: {0}")]
    MissingInput(String),
    /// An input exists but its content is rejected. Exit status 3.
    #[error("invalid input: {0}")]
    Validation(String),
    /// An internal consistency check failed. Exit status 4.
    #[error("internal error: {0}")]
    Internal(String),
    /// Any other failure, such as an unwritable output. Exit status 1.
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::MissingInput(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn from_io(path: &Path, e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingInput(path.display().to_string())
        } else {
            CliError::Io(format!("{}: {e}", path.display()))
        }
    }
}

impl From<cxrlabel_core::Error> for CliError {
    fn from(e: cxrlabel_core::Error) -> Self {
        match e {
            cxrlabel_core::Error::Io { path, source } => CliError::from_io(&path, source),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<&CliError> for ExitCode {
    fn from(e: &CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
