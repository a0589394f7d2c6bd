use dicke_qfi::QfiError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("capacity exceeded: {0}")]
    Capacity(QfiError),
    #[error("numerical failure: {0}")]
    Numeric(QfiError),
    #[error("acceptance failed: {failed} criteria")]
    Acceptance { failed: usize },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Serialize(String),
}

impl BenchError {
    /// 0 success, 1 acceptance or numerical failure, 2 invalid config, 3 capacity exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Capacity(_) => 3,
            BenchError::Acceptance { .. } | BenchError::Numeric(_) => 1,
            BenchError::Io(_) | BenchError::Serialize(_) => 1,
        }
    }
}

impl From<QfiError> for BenchError {
    fn from(e: QfiError) -> Self {
        match e {
            QfiError::Capacity { .. } => BenchError::Capacity(e),
            QfiError::InvalidArgument(msg) => BenchError::Config(msg),
            other => BenchError::Numeric(other),
        }
    }
}

impl From<serde_json::Error> for BenchError {
    fn from(e: serde_json::Error) -> Self {
        BenchError::Serialize(e.to_string())
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Serialize(e.to_string())
    }
}

pub type BenchResult<T> = std::result::Result<T, BenchError>;
