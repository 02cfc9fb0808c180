//! Dense linear algebra: Hessenberg reduction, real and complex Schur
//! decompositions, triangular eigenvectors and LU.

mod eigvec;
mod householder;
mod lu;
mod matrix;
mod schur;

pub use eigvec::{overlap_matrix, self_overlaps, triangular_eigenvectors, unit_upper_inverse};
pub use householder::{complete_basis, hessenberg};
pub use lu::Lu;
pub use matrix::Matrix;
pub use schur::{complex_schur, real_schur, ComplexSchur, RealSchur};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("QR iteration failed to converge at index {index}")]
    NoConvergence { index: usize },
    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },
}
