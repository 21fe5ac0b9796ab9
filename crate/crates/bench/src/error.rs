// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use lpa_core::{GraphError, LpaError, QualityError};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Validation {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{}: vertex {id} has no label", path.display())]
    MissingVertex { path: PathBuf, id: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lpa(#[from] LpaError),
    #[error(transparent)]
    Quality(#[from] QualityError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl BenchError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 usage, 2 input, 3 internal invariant violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) | BenchError::Lpa(LpaError::InvalidConfig(_)) => 1,
            BenchError::Lpa(LpaError::Probe(_)) => 3,
            _ => 2,
        }
    }
}
