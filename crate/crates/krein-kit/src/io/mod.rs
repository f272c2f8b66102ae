//! File formats: Matrix Market matrices, instance JSON, CSV tables.

pub mod csv;
pub mod instance;
pub mod matrix_market;

pub use instance::{load_instance, save_instance, InstanceFile, MatrixLayout, MatrixSource};
pub use matrix_market::{MmMatrix, MmStorage};

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error")]
    Io(#[from] std::io::Error),
    #[error("cannot access `{path}`")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported: {what}")]
    Unsupported { what: String },
    #[error("json error")]
    Json(#[from] serde_json::Error),
    #[error("schema mismatch: found `{found}`, expected `{expected}`")]
    SchemaMismatch { found: String, expected: &'static str },
    #[error("instance invalid: {message}")]
    InstanceInvalid { message: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
