//! Direct solvers on dense matrices.

use super::matrix::DenseMatrix;
use super::LinalgError;
use crate::config::Tolerances;

/// Solve `H X = RHS` with partial-pivot LU plus one step of iterative
/// refinement. The solution is accepted only if the residual satisfies
/// `‖HX - RHS‖ ≤ tol * ‖H‖ * ‖X‖` (Frobenius norms).
pub fn linear_solve(h: &DenseMatrix, rhs: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    linear_solve_with(h, rhs, &Tolerances::default())
}

pub fn linear_solve_with(
    h: &DenseMatrix,
    rhs: &DenseMatrix,
    tol: &Tolerances,
) -> Result<DenseMatrix, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NonSquare { rows: h.rows(), cols: h.cols() });
    }
    if h.rows() != rhs.rows() {
        return Err(LinalgError::DimensionMismatch {
            context: format!("linear_solve: {}x{} vs rhs {}x{}", h.rows(), h.cols(), rhs.rows(), rhs.cols()),
        });
    }
    if !h.all_finite() || !rhs.all_finite() {
        return Err(LinalgError::NonFinite { context: "linear_solve input".into() });
    }
    let lu = h.to_nalgebra().lu();
    let rhs_na = rhs.to_nalgebra();
    let mut x = lu
        .solve(&rhs_na)
        .ok_or(LinalgError::SingularToTolerance { context: "linear_solve: LU".into() })?;

    // One refinement step mops up most of the pivot-growth error.
    let h_na = h.to_nalgebra();
    let resid = &rhs_na - &h_na * &x;
    if let Some(dx) = lu.solve(&resid) {
        x += dx;
    }

    let x_dm = DenseMatrix::from_nalgebra(&x);
    if !x_dm.all_finite() {
        return Err(LinalgError::SingularToTolerance {
            context: "linear_solve: non-finite solution".into(),
        });
    }
    let resid_norm = (rhs - &h.matmul(&x_dm)).norm_fro();
    let bound = tol.linear_solve * h.norm_fro() * x_dm.norm_fro().max(f64::MIN_POSITIVE);
    if resid_norm > bound && resid_norm > tol.linear_solve * rhs.norm_fro() {
        return Err(LinalgError::SingularToTolerance {
            context: format!("linear_solve: residual {resid_norm:.3e} exceeds bound {bound:.3e}"),
        });
    }
    Ok(x_dm)
}

/// Inverse of a symmetric positive definite matrix via Cholesky.
pub fn spd_inverse(h: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NonSquare { rows: h.rows(), cols: h.cols() });
    }
    let chol = nalgebra::Cholesky::new(h.symmetrize().to_nalgebra())
        .ok_or(LinalgError::NotPositiveDefinite { min_eigenvalue: f64::NAN })?;
    let inv = chol.inverse();
    Ok(DenseMatrix::from_nalgebra(&inv).symmetrize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_diagonal() {
        let h = DenseMatrix::identity(3);
        let rhs = DenseMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let x = linear_solve(&h, &rhs).unwrap();
        assert_eq!(x, rhs);

        let h = DenseMatrix::diagonal(&[2.0, 4.0]);
        let rhs = DenseMatrix::from_rows(&[vec![2.0], vec![4.0]]).unwrap();
        let x = linear_solve(&h, &rhs).unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((x[(1, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn singular_rejected() {
        let h = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let rhs = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(linear_solve(&h, &rhs).is_err());
    }

    #[test]
    fn random_well_conditioned_40() {
        let n = 40;
        let mut h = DenseMatrix::from_fn(n, n, |i, j| {
            (((i * 13 + j * 29 + 3) % 83) as f64 / 83.0) - 0.5
        });
        h = h.add_scaled_identity(n as f64); // diagonally dominant
        let rhs = DenseMatrix::from_fn(n, 3, |i, j| ((i + j) % 7) as f64 - 3.0);
        let x = linear_solve(&h, &rhs).unwrap();
        let resid = (&rhs - &h.matmul(&x)).norm_fro();
        assert!(resid <= 1e-10 * h.norm_fro() * x.norm_fro());
    }

    #[test]
    fn spd_inverse_matches_solve() {
        let h = DenseMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let inv = spd_inverse(&h).unwrap();
        let prod = &h * &inv;
        assert!((&prod - &DenseMatrix::identity(2)).norm_max() < 1e-13);
        let indef = DenseMatrix::diagonal(&[1.0, -2.0]);
        assert!(spd_inverse(&indef).is_err());
    }
}
