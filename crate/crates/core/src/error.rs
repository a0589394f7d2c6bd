use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfiError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |A - A^H| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error(
        "Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off_diagonal:e})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("{n_qubits} qubits exceeds the {basis} capacity of {cap}")]
    Capacity {
        n_qubits: usize,
        cap: usize,
        basis: &'static str,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("incomplete POVM: max |sum E - I| = {deviation:e}")]
    IncompletePovm { deviation: f64 },
}

pub type Result<T> = std::result::Result<T, QfiError>;
