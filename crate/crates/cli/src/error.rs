use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    ConfigParse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: invalid value for `{key}`: {message}")]
    SchemaViolation {
        path: String,
        key: String,
        message: String,
    },
    #[error("scenario `{scenario}`: {source}")]
    Domain {
        scenario: String,
        #[source]
        source: crooks_core::Error,
    },
    #[error("scenario `{scenario}`: {message}")]
    InvalidScenario { scenario: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Output(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
