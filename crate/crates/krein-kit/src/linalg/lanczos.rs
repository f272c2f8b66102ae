//! Shift-invert Lanczos for the smallest eigenvalues of a sparse
//! symmetric-definite pencil `G c = λ M c`.
//!
//! The spectral transform works with `Op = (G - σM)⁻¹ M`, which is
//! self-adjoint in the M inner product with eigenvalues `θ = 1/(λ - σ)`; the
//! largest θ correspond to the smallest pencil eigenvalues above the shift.
//! The factorization is a band Cholesky of `G - σM`, which suits the
//! grid-ordered matrices this path exists for.

use super::matrix::{dot, DenseMatrix};
use super::pencil::PencilEigs;
use super::qr::fix_column_signs;
use super::sparse::{BandCholesky, SparseSymMatrix};
use super::{eigen::sym_eig, LinalgError};

/// Convergence threshold on the relative Ritz residual `|β s_last| / |θ|`.
const RITZ_TOL: f64 = 1e-13;

/// `k` smallest eigenpairs of `G c = λ M c` for sparse symmetric `G` and
/// sparse symmetric positive definite `M`, using a shift `σ` strictly below
/// the smallest eigenvalue (`G - σM` must be positive definite).
///
/// Vectors come back M-orthonormal with the crate sign convention; values are
/// ascending. Full reorthogonalization keeps the basis clean, so the result
/// matches the dense path to solver precision on anything small enough to
/// compare.
pub fn smallest_pencil_eigs(
    g: &SparseSymMatrix,
    m: &SparseSymMatrix,
    k: usize,
    shift: f64,
) -> Result<PencilEigs, LinalgError> {
    let n = g.dim();
    if m.dim() != n {
        return Err(LinalgError::DimensionMismatch {
            context: format!("smallest_pencil_eigs: {} vs {}", n, m.dim()),
        });
    }
    if k == 0 || k > n {
        return Err(LinalgError::DimensionMismatch {
            context: format!("smallest_pencil_eigs: k={k} outside 1..={n}"),
        });
    }
    let c = g.add_scaled(m, -shift)?;
    let chol = BandCholesky::factor(&c)?;

    let max_iter = n.min((6 * k + 80).max(120));
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut m_basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_iter);
    let mut beta: Vec<f64> = Vec::with_capacity(max_iter);

    // deterministic start vector with no accidental symmetry
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) / (n as f64)).collect();
    m_normalize(m, &mut v)?;

    loop {
        let mv = m.matvec(&v);
        let mut w = chol.solve(&mv);
        let a = dot(&w, &mv);
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= a * vi;
        }
        if let Some(prev) = basis.last() {
            let b = beta[beta.len() - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= b * pi;
            }
        }
        basis.push(std::mem::take(&mut v));
        m_basis.push(mv);

        // full reorthogonalization, twice for safety
        for _ in 0..2 {
            for (u, mu) in basis.iter().zip(&m_basis) {
                let c = dot(&w, mu);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }

        let j = basis.len();
        let (theta, s) = tridiag_eig(&alpha, &beta)?;
        let b_next = dot(&w, &m.matvec(&w)).max(0.0).sqrt();

        // Ritz pairs for the k largest theta (smallest lambda)
        let mut order: Vec<usize> = (0..j).collect();
        order.sort_by(|&x, &y| theta[y].total_cmp(&theta[x]));
        let wanted: Vec<usize> = order.into_iter().take(k).collect();
        let converged = j >= k
            && wanted
                .iter()
                .all(|&idx| (b_next * s[(j - 1, idx)]).abs() <= RITZ_TOL * theta[idx].abs().max(f64::MIN_POSITIVE));

        if converged || j == n || j == max_iter {
            if !(converged || j == n) {
                return Err(LinalgError::ConvergenceFailure {
                    context: format!("smallest_pencil_eigs: {j} iterations"),
                });
            }
            if j < k {
                return Err(LinalgError::ConvergenceFailure {
                    context: "smallest_pencil_eigs: basis exhausted early".into(),
                });
            }
            return assemble(g, m, shift, &basis, &theta, &s, &wanted);
        }

        if b_next <= 1e-300 {
            // invariant subspace found; restart with a fresh direction
            let mut fresh: Vec<f64> =
                (0..n).map(|i| ((i * 2654435761 + j) % 1000) as f64 / 1000.0 + 0.5).collect();
            for (u, mu) in basis.iter().zip(&m_basis) {
                let c = dot(&fresh, mu);
                for (fi, ui) in fresh.iter_mut().zip(u) {
                    *fi -= c * ui;
                }
            }
            m_normalize(m, &mut fresh)?;
            beta.push(0.0);
            v = fresh;
        } else {
            beta.push(b_next);
            for wi in w.iter_mut() {
                *wi /= b_next;
            }
            v = w;
        }
    }
}

fn m_normalize(m: &SparseSymMatrix, v: &mut [f64]) -> Result<(), LinalgError> {
    let nrm = dot(v, &m.matvec(v)).sqrt();
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(LinalgError::NotPositiveDefinite { min_eigenvalue: nrm });
    }
    for x in v.iter_mut() {
        *x /= nrm;
    }
    Ok(())
}

/// Eigen-decomposition of the Lanczos tridiagonal (dense; the basis stays
/// small compared to the problem).
fn tridiag_eig(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, DenseMatrix), LinalgError> {
    let j = alpha.len();
    let mut t = DenseMatrix::zeros(j, j);
    for (i, &a) in alpha.iter().enumerate() {
        t[(i, i)] = a;
    }
    for (i, &b) in beta.iter().enumerate().take(j.saturating_sub(1)) {
        t[(i, i + 1)] = b;
        t[(i + 1, i)] = b;
    }
    let e = sym_eig(&t)?;
    Ok((e.values, e.vectors))
}

fn assemble(
    g: &SparseSymMatrix,
    m: &SparseSymMatrix,
    shift: f64,
    basis: &[Vec<f64>],
    theta: &[f64],
    s: &DenseMatrix,
    wanted: &[usize],
) -> Result<PencilEigs, LinalgError> {
    let n = g.dim();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(wanted.len());
    for &idx in wanted {
        let th = theta[idx];
        if !(th > 0.0) {
            return Err(LinalgError::ConvergenceFailure {
                context: format!("smallest_pencil_eigs: nonpositive spectral-transform value {th:.3e}"),
            });
        }
        let lam = shift + 1.0 / th;
        let mut x = vec![0.0f64; n];
        for (col, u) in basis.iter().enumerate() {
            let w = s[(col, idx)];
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi += w * ui;
            }
        }
        let nrm = dot(&x, &m.matvec(&x)).sqrt();
        for xi in x.iter_mut() {
            *xi /= nrm;
        }
        pairs.push((lam, x));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vectors = DenseMatrix::zeros(n, pairs.len());
    for (j, (_, x)) in pairs.iter().enumerate() {
        vectors.set_column(j, x);
    }
    fix_column_signs(&mut vectors);
    if values.iter().any(|v| !v.is_finite()) || !vectors.all_finite() {
        return Err(LinalgError::NonFinite { context: "smallest_pencil_eigs output".into() });
    }
    Ok(PencilEigs { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pencil::gen_sym_eig;

    fn second_difference(n: usize) -> SparseSymMatrix {
        let h = 1.0 / (n as f64 + 1.0);
        let s = 1.0 / (h * h);
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 * s));
            if i + 1 < n {
                t.push((i, i + 1, -s));
                t.push((i + 1, i, -s));
            }
        }
        SparseSymMatrix::from_triplets(n, &t).unwrap()
    }

    fn interval_pencil(n: usize) -> (SparseSymMatrix, SparseSymMatrix) {
        // G = (A²) restricted to interior-supported columns, M = A restricted
        let a = second_difference(n);
        let deep: Vec<usize> = (1..n - 1).collect();
        let mut gt = Vec::new();
        let mut mt = Vec::new();
        for (ii, &i) in deep.iter().enumerate() {
            for (jj, &j) in deep.iter().enumerate() {
                let mut a2 = 0.0;
                let (cols, vals) = a.row(i);
                for (&kk, &v) in cols.iter().zip(vals) {
                    a2 += v * a.get(kk, j);
                }
                if a2 != 0.0 {
                    gt.push((ii, jj, a2));
                }
                let mij = a.get(i, j);
                if mij != 0.0 {
                    mt.push((ii, jj, mij));
                }
            }
        }
        let d = deep.len();
        (
            SparseSymMatrix::from_triplets(d, &gt).unwrap(),
            SparseSymMatrix::from_triplets(d, &mt).unwrap(),
        )
    }

    #[test]
    fn matches_dense_path_k3() {
        let (g, m) = interval_pencil(50);
        let it = smallest_pencil_eigs(&g, &m, 3, 0.0).unwrap();
        let dense = gen_sym_eig(&g.to_dense(), &m.to_dense()).unwrap();
        for j in 0..3 {
            let rel = (it.values[j] - dense.values[j]).abs() / dense.values[j];
            assert!(rel <= 1e-8, "rel {rel} at {j}");
        }
        assert!(it.max_relative_residual(&g.to_dense(), &m.to_dense()) <= 1e-10);
    }

    #[test]
    fn full_spectrum_matches_dense() {
        let (g, m) = interval_pencil(30);
        let d = g.dim();
        let it = smallest_pencil_eigs(&g, &m, d, 0.0).unwrap();
        let dense = gen_sym_eig(&g.to_dense(), &m.to_dense()).unwrap();
        for j in 0..d {
            let rel = (it.values[j] - dense.values[j]).abs() / dense.values[j];
            assert!(rel <= 1e-8, "rel {rel} at {j}");
        }
    }

    #[test]
    fn equal_pencil_gives_one() {
        let m = second_difference(12);
        let it = smallest_pencil_eigs(&m, &m, 1, 0.0).unwrap();
        assert!((it.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_shift_rejected() {
        let (g, m) = interval_pencil(20);
        // shift far above the spectrum makes G - σM indefinite
        assert!(matches!(
            smallest_pencil_eigs(&g, &m, 1, 1e12),
            Err(LinalgError::NotPositiveDefinite { .. })
        ));
        assert!(smallest_pencil_eigs(&g, &m, 0, 0.0).is_err());
    }
}
