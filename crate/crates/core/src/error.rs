use thiserror::Error;

/// Errors raised by the inference engine and the experiment harness.
#[derive(Debug, Error)]
pub enum AbcError {
    #[error("value {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(&'static str),

    #[error("insufficient sample: need at least {needed} accepted draws, have {have}")]
    InsufficientSample { needed: usize, have: usize },

    #[error("no proposals were accepted out of {proposed}; raise the bandwidth or the acceptance proportion")]
    ZeroAcceptances { proposed: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, AbcError>;

impl AbcError {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        AbcError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
