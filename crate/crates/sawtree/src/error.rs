use std::io;
use std::path::PathBuf;

use sawtree_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("unknown experiment {0:?}")]
    UnknownExperiment(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl AppError {
    pub fn usage(msg: impl Into<String>) -> Self {
        AppError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        AppError::Io { path: path.into(), source }
    }

    /// 2 for an exhausted budget or tolerance, 3 for bad input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(CoreError::BudgetExceeded { .. } | CoreError::RefinementExhausted { .. }) => 2,
            AppError::Core(CoreError::Stuck) => 1,
            AppError::Core(_) | AppError::Config { .. } | AppError::Usage(_) | AppError::UnknownExperiment(_) => 3,
            AppError::Io { .. } | AppError::Csv(_) | AppError::Json(_) => 1,
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
