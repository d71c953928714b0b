//! Harness-level error type; estimator errors pass through unchanged.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset {name}: {detail}")]
    Dataset { name: String, detail: String },

    #[error("config: {detail}")]
    Config { detail: String },

    #[error("study: {detail}")]
    Study { detail: String },

    #[error(transparent)]
    Core(#[from] bede::Error),
}
