use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A structured input could not be parsed. `line` is 1-based when known.
    #[error("malformed {what}{}: {detail}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Malformed {
        what: &'static str,
        line: Option<usize>,
        detail: String,
    },

    #[error("unknown finding {0:?}")]
    UnknownFinding(String),

    #[error("invalid ontology: {0}")]
    InvalidOntology(String),

    #[error("invalid rule at line {line}: {detail}")]
    InvalidRule { line: usize, detail: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(what: &'static str, line: Option<usize>, detail: impl ToString) -> Self {
        Error::Malformed {
            what,
            line,
            detail: detail.to_string(),
        }
    }

    /// True for errors caused by the content of an input rather than its
    /// absence or an I/O failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
