//! Dense and sparse symmetric linear algebra used by the extension and
//! buckling constructions.
//!
//! Everything is real double precision. All functions are pure: no shared
//! mutable state, safe to call concurrently, and bitwise deterministic for a
//! fixed build and input (internal row-parallelism partitions output rows
//! disjointly).

mod eigen;
mod factor;
pub mod lanczos;
mod matrix;
mod pencil;
mod qr;
pub mod sparse;

pub use eigen::{min_eigenvalue, spd_inverse_sqrt, sym_eig, sym_eig_with, EigenDecomposition};
pub use factor::{linear_solve, linear_solve_with, spd_inverse};
pub use lanczos::smallest_pencil_eigs;
pub use matrix::{dot, norm2, DenseMatrix};
pub use pencil::{gen_sym_eig, PencilEigs};
pub use qr::{
    fix_column_signs, orthonormal_range_and_complement, orthonormalize_columns, qr_square,
    RangeSplit,
};
pub use sparse::{BandCholesky, SparseSymMatrix};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("asymmetry {asymmetry:.3e} exceeds tolerance relative to scale {scale:.3e}")]
    AsymmetryBeyondTolerance { asymmetry: f64, scale: f64 },
    #[error("eigensolver failed to converge ({context})")]
    ConvergenceFailure { context: String },
    #[error("matrix is not positive definite (pivot/eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("matrix is singular to working tolerance ({context})")]
    SingularToTolerance { context: String },
    #[error("non-finite values encountered ({context})")]
    NonFinite { context: String },
}

/// Largest principal angle between the column spans of two orthonormal
/// matrices, on the sine scale: `‖(I - X Xᵀ) Y‖₂`. Accurate for tiny angles,
/// which is where the checks in this crate live.
pub fn max_principal_angle_sin(x: &DenseMatrix, y: &DenseMatrix) -> Result<f64, LinalgError> {
    if x.rows() != y.rows() {
        return Err(LinalgError::DimensionMismatch {
            context: format!("principal angles: {} vs {} rows", x.rows(), y.rows()),
        });
    }
    if y.cols() == 0 {
        return Ok(0.0);
    }
    // R = Y - X (Xᵀ Y)
    let xty = x.transpose().matmul(y);
    let r = &y.clone() - &x.matmul(&xty);
    // 2-norm via the Gram matrix of the thin residual
    let gram = r.transpose().matmul(&r).symmetrize();
    let eig = sym_eig(&gram)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_angle_of_identical_spans_is_zero() {
        let x = DenseMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let s = max_principal_angle_sin(&x, &x).unwrap();
        assert!(s < 1e-14);
    }

    #[test]
    fn principal_angle_of_orthogonal_spans_is_one() {
        let x = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let y = DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap();
        let s = max_principal_angle_sin(&x, &y).unwrap();
        assert!((s - 1.0).abs() < 1e-14);
    }
}
