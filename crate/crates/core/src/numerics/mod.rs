//! Dense complex linear algebra.

mod eigen;
mod matrix;

pub use eigen::{
    hermitian_eigen, hermitian_eigen_with, unitary_evolution, EigenDecomposition, SweepOrder,
    CONVERGENCE_FACTOR, HERMITIAN_TOLERANCE, MAX_SWEEPS,
};
pub use matrix::{inner, matmul, norm, ComplexMatrix, C64, I, ONE, ZERO};
