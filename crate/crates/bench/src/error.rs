use thiserror::Error;

use kmpp::{DataError, SeedError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}: {message}")]
    Load { row: usize, message: String },
    #[error("no rows survived preprocessing ({dropped} dropped)")]
    NoRows { dropped: usize },
    #[error("no numeric columns left after dropping")]
    NoColumns,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid synthetic spec: {0}")]
    Spec(String),
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

impl HarnessError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// CLI exit code: 2 invalid arguments, 3 data error, 4 degenerate instance.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Spec(_) | HarnessError::Plan(_) => 2,
            HarnessError::Seed(SeedError::InvalidK { .. }) => 2,
            HarnessError::Seed(e) if e.is_degenerate() => 4,
            _ => 3,
        }
    }
}
