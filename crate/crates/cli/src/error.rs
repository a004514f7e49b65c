use oplab_core::LabError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config at {path}: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("{operation}: {source}")]
    Operation {
        operation: &'static str,
        #[source]
        source: LabError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
}

/// Tags a library error with the operation that raised it.
pub trait OpContext<T> {
    fn op(self, operation: &'static str) -> Result<T, CliError>;
}

impl<T> OpContext<T> for oplab_core::Result<T> {
    fn op(self, operation: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Operation { operation, source })
    }
}
