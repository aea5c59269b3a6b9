use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] memtrack::Error),
    /// Invalid configuration or scene description; `field` is the dotted path.
    #[error("config error at {field}: {message}")]
    Config { field: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("image error on {path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("{0}")]
    Validation(String),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// True for bad input (exit code 1), false for runtime failures (exit code 2).
    pub fn is_validation(&self) -> bool {
        match self {
            Self::Config { .. } | Self::Validation(_) => true,
            Self::Core(e) => matches!(e, memtrack::Error::Alignment { .. } | memtrack::Error::Parse { .. }),
            Self::Io { .. } | Self::Image { .. } => false,
        }
    }
}
