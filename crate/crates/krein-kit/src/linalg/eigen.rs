//! Symmetric eigendecomposition and functions built on it.

use super::matrix::DenseMatrix;
use super::qr::fix_column_signs;
use super::LinalgError;
use crate::config::Tolerances;

/// Spectral decomposition of a symmetric matrix: ascending eigenvalues and an
/// orthonormal eigenvector matrix whose columns follow the deterministic
/// first-nonzero-positive sign convention.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

const MAX_EIGEN_SWEEPS: usize = 100_000;

/// Full spectral decomposition of a symmetric matrix.
///
/// The input is symmetrized internally; asymmetry beyond `tol.symmetry`
/// (relative to the largest entry) is rejected rather than silently averaged
/// away.
pub fn sym_eig(h: &DenseMatrix) -> Result<EigenDecomposition, LinalgError> {
    sym_eig_with(h, &Tolerances::default())
}

pub fn sym_eig_with(h: &DenseMatrix, tol: &Tolerances) -> Result<EigenDecomposition, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NonSquare { rows: h.rows(), cols: h.cols() });
    }
    if !h.all_finite() {
        return Err(LinalgError::NonFinite { context: "sym_eig input".into() });
    }
    let scale = h.norm_max();
    if h.max_asymmetry() > tol.symmetry * scale {
        return Err(LinalgError::AsymmetryBeyondTolerance {
            asymmetry: h.max_asymmetry(),
            scale,
        });
    }
    if h.rows() == 0 {
        return Ok(EigenDecomposition { values: vec![], vectors: DenseMatrix::zeros(0, 0) });
    }
    let sym = h.symmetrize();
    let na = sym.to_nalgebra();
    let eig = nalgebra::SymmetricEigen::try_new(na, f64::EPSILON, MAX_EIGEN_SWEEPS)
        .ok_or(LinalgError::ConvergenceFailure { context: "sym_eig".into() })?;

    let n = h.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DenseMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    fix_column_signs(&mut vectors);

    if !vectors.all_finite() || values.iter().any(|v| !v.is_finite()) {
        return Err(LinalgError::NonFinite { context: "sym_eig output".into() });
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(h: &DenseMatrix) -> Result<f64, LinalgError> {
    Ok(*sym_eig(h)?
        .values
        .first()
        .ok_or(LinalgError::DimensionMismatch { context: "min_eigenvalue: empty".into() })?)
}

/// `H^{-1/2}` for symmetric positive definite `H`.
pub fn spd_inverse_sqrt(h: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    let eig = sym_eig(h)?;
    let min = *eig.values.first().ok_or(LinalgError::DimensionMismatch {
        context: "spd_inverse_sqrt: empty".into(),
    })?;
    if min <= 0.0 {
        return Err(LinalgError::NotPositiveDefinite { min_eigenvalue: min });
    }
    let d = DenseMatrix::diagonal(
        &eig.values.iter().map(|v| 1.0 / v.sqrt()).collect::<Vec<_>>(),
    );
    let vd = eig.vectors.matmul(&d);
    Ok(vd.matmul(&eig.vectors.transpose()).symmetrize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_case() {
        let h = DenseMatrix::diagonal(&[3.0, 2.0]);
        let e = sym_eig(&h).unwrap();
        assert_eq!(e.values, vec![2.0, 3.0]);
        // identity columns up to ordering
        assert!((e.vectors[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((e.vectors[(0, 1)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn off_diagonal_2x2() {
        let h = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = sym_eig(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14);
        assert!((e.values[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2.0f64.sqrt();
        // sign convention: first nonzero component positive
        assert!((e.vectors[(0, 0)] - s).abs() < 1e-14);
        assert!((e.vectors[(1, 0)] + s).abs() < 1e-14);
        assert!((e.vectors[(0, 1)] - s).abs() < 1e-14);
        assert!((e.vectors[(1, 1)] - s).abs() < 1e-14);
    }

    #[test]
    fn rejects_asymmetry_and_nan() {
        let h = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.5, 1.0]]).unwrap();
        assert!(matches!(sym_eig(&h), Err(LinalgError::AsymmetryBeyondTolerance { .. })));
        let mut g = DenseMatrix::identity(2);
        g[(0, 0)] = f64::NAN;
        assert!(matches!(sym_eig(&g), Err(LinalgError::NonFinite { .. })));
        let rect = DenseMatrix::zeros(2, 3);
        assert!(matches!(sym_eig(&rect), Err(LinalgError::NonSquare { .. })));
    }

    #[test]
    fn reconstruction_random_50() {
        let n = 50;
        // deterministic pseudo-random symmetric matrix
        let mut h = DenseMatrix::from_fn(n, n, |i, j| {
            let x = ((i * 131 + j * 17 + 7) % 101) as f64 / 101.0 - 0.5;
            x
        });
        h = h.symmetrize();
        let e = sym_eig(&h).unwrap();
        let v = &e.vectors;
        let lam = DenseMatrix::diagonal(&e.values);
        let rec = &(v * &lam) * &v.transpose();
        assert!((&rec - &h).norm_fro() <= 1e-10 * h.norm_fro());
        let vtv = &v.transpose() * v;
        assert!((&vtv - &DenseMatrix::identity(n)).norm_max() <= 1e-12 * n as f64);
        let hv = &h * v;
        let vl = v * &lam;
        assert!((&hv - &vl).norm_max() <= 1e-10 * h.norm_max());
        // ascending
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn inverse_sqrt_diagonal_and_identity() {
        let h = DenseMatrix::diagonal(&[4.0, 4.0, 4.0]);
        let r = spd_inverse_sqrt(&h).unwrap();
        assert!((&r - &DenseMatrix::identity(3).scale(0.5)).norm_max() < 1e-14);
        let h2 = DenseMatrix::diagonal(&[1.0, 9.0]);
        let r2 = spd_inverse_sqrt(&h2).unwrap();
        assert!((r2[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((r2[(1, 1)] - 1.0 / 3.0).abs() < 1e-14);
        let bad = DenseMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            spd_inverse_sqrt(&bad),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn inverse_sqrt_defining_identity_random_20() {
        let n = 20;
        let mut x = DenseMatrix::from_fn(n, n, |i, j| {
            (((i * 37 + j * 53 + 11) % 97) as f64 / 97.0) - 0.5
        });
        x = &x * &x.transpose(); // PSD
        let h = x.add_scaled_identity(0.5); // PD
        let r = spd_inverse_sqrt(&h).unwrap();
        let rhr = &(&r * &h) * &r;
        let eig = sym_eig(&h).unwrap();
        let cond = eig.values[n - 1] / eig.values[0];
        assert!((&rhr - &DenseMatrix::identity(n)).norm_fro() <= 1e-10 * cond);
        assert!((&rhr - &DenseMatrix::identity(n)).norm_fro() <= 1e-9);
    }
}
