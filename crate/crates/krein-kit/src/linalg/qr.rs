//! Householder QR with optional column pivoting, used for orthonormal bases,
//! numerical rank, and orthogonal complements.

use super::matrix::DenseMatrix;
use super::LinalgError;

/// Output of [`orthonormal_range_and_complement`].
#[derive(Debug, Clone)]
pub struct RangeSplit {
    /// Orthonormal basis of the column space, `n x rank`.
    pub range: DenseMatrix,
    /// Orthonormal basis of the orthogonal complement, `n x (n - rank)`.
    pub complement: DenseMatrix,
    pub rank: usize,
}

struct QrFactors {
    /// Full orthogonal factor, `n x n`.
    q: DenseMatrix,
    /// Absolute values of the R diagonal, one per processed column.
    r_diag_abs: Vec<f64>,
    /// R factor (only meaningful when no pivoting was requested).
    r: DenseMatrix,
}

/// Householder QR of `a` (n x m). With `pivot`, columns are swapped so the
/// diagonal of R is non-increasing in magnitude, which makes the diagonal a
/// usable rank detector.
fn householder_qr(a: &DenseMatrix, pivot: bool) -> QrFactors {
    let n = a.rows();
    let m = a.cols();
    let steps = n.min(m);
    let mut r = a.clone();
    let mut q = DenseMatrix::identity(n);
    let mut r_diag_abs = Vec::with_capacity(steps);

    for k in 0..steps {
        if pivot {
            // Freshly computed trailing norms; m is small for our workloads.
            let mut best = k;
            let mut best_norm = 0.0;
            for j in k..m {
                let nj: f64 = (k..n).map(|i| r[(i, j)] * r[(i, j)]).sum();
                if nj > best_norm {
                    best_norm = nj;
                    best = j;
                }
            }
            if best != k {
                for i in 0..n {
                    let t = r[(i, k)];
                    r[(i, k)] = r[(i, best)];
                    r[(i, best)] = t;
                }
            }
        }

        // Householder vector for column k below the diagonal.
        let mut alpha: f64 = (k..n).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            r_diag_abs.push(0.0);
            continue;
        }
        if r[(k, k)] > 0.0 {
            alpha = -alpha;
        }
        let mut v: Vec<f64> = (k..n).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            r_diag_abs.push(alpha.abs());
            continue;
        }
        let tau = 2.0 / vnorm2;

        // Apply H = I - tau v vᵀ to the trailing part of R.
        for j in k..m {
            let s: f64 = (k..n).map(|i| v[i - k] * r[(i, j)]).sum();
            let s = s * tau;
            for i in k..n {
                r[(i, j)] -= s * v[i - k];
            }
        }
        // Accumulate Q <- Q H (right multiplication touches columns k..).
        for i in 0..n {
            let s: f64 = (k..n).map(|j| q[(i, j)] * v[j - k]).sum();
            let s = s * tau;
            for j in k..n {
                q[(i, j)] -= s * v[j - k];
            }
        }
        r_diag_abs.push(r[(k, k)].abs());
    }

    QrFactors { q, r_diag_abs, r }
}

/// Orthonormal basis of `span(b)` together with an orthonormal basis of its
/// orthogonal complement. The rank decision uses `rank_tol` when given,
/// otherwise `max(n, m) * machine_eps * sigma_max_proxy` with the leading
/// pivoted R diagonal standing in for the largest singular value.
pub fn orthonormal_range_and_complement(
    b: &DenseMatrix,
    rank_tol: Option<f64>,
) -> Result<RangeSplit, LinalgError> {
    if b.rows() == 0 || b.cols() == 0 {
        return Err(LinalgError::DimensionMismatch {
            context: "orthonormal_range_and_complement: empty matrix".into(),
        });
    }
    if !b.all_finite() {
        return Err(LinalgError::NonFinite { context: "orthonormal_range_and_complement".into() });
    }
    let n = b.rows();
    let f = householder_qr(b, true);
    let sigma_max = f.r_diag_abs.first().copied().unwrap_or(0.0);
    let tol = rank_tol.unwrap_or(n.max(b.cols()) as f64 * f64::EPSILON * sigma_max);
    let rank = f.r_diag_abs.iter().take_while(|&&d| d > tol).count();

    let mut q = f.q;
    fix_column_signs(&mut q);
    let range = q.select_columns(&(0..rank).collect::<Vec<_>>());
    let complement = q.select_columns(&(rank..n).collect::<Vec<_>>());
    Ok(RangeSplit { range, complement, rank })
}

/// Orthonormalize the columns of a full-column-rank matrix. Fails when the
/// numerical rank drops below the column count.
pub fn orthonormalize_columns(a: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    if a.rows() == 0 || a.cols() == 0 || a.cols() > a.rows() {
        return Err(LinalgError::DimensionMismatch {
            context: format!("orthonormalize_columns: {}x{}", a.rows(), a.cols()),
        });
    }
    // No pivoting: the span of the leading columns is preserved step by step,
    // so Q's leading block spans col(a) exactly when a has full column rank.
    let f = householder_qr(a, false);
    let tol = a.rows() as f64 * f64::EPSILON * f.r_diag_abs.iter().cloned().fold(0.0, f64::max);
    if f.r_diag_abs.len() < a.cols() || f.r_diag_abs.iter().any(|&d| d <= tol) {
        return Err(LinalgError::SingularToTolerance {
            context: "orthonormalize_columns: rank-deficient input".into(),
        });
    }
    let mut q = f.q.select_columns(&(0..a.cols()).collect::<Vec<_>>());
    fix_column_signs(&mut q);
    Ok(q)
}

/// Deterministic sign convention: first component of each column that is not
/// negligible (relative to the column max) is made positive.
pub fn fix_column_signs(m: &mut DenseMatrix) {
    for j in 0..m.cols() {
        let col_max = (0..m.rows()).fold(0.0f64, |acc, i| acc.max(m[(i, j)].abs()));
        if col_max == 0.0 {
            continue;
        }
        let thresh = 1e-12 * col_max;
        let lead = (0..m.rows()).find(|&i| m[(i, j)].abs() > thresh);
        if let Some(i0) = lead {
            if m[(i0, j)] < 0.0 {
                for i in 0..m.rows() {
                    m[(i, j)] = -m[(i, j)];
                }
            }
        }
    }
}

/// Plain QR of a square matrix, exposed for deterministic random-orthogonal
/// generation. Returns (Q, R) with Q's columns sign-fixed so that R's diagonal
/// is nonnegative.
pub fn qr_square(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    assert!(a.is_square());
    let f = householder_qr(a, false);
    let mut q = f.q;
    let mut r = f.r;
    for k in 0..a.rows() {
        if r[(k, k)] < 0.0 {
            for j in 0..a.cols() {
                r[(k, j)] = -r[(k, j)];
            }
            for i in 0..a.rows() {
                q[(i, k)] = -q[(i, k)];
            }
        }
    }
    (q, r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_split(b: &DenseMatrix, split: &RangeSplit) {
        let n = b.rows();
        let q = &split.range;
        let k = &split.complement;
        assert_eq!(q.cols() + k.cols(), n);
        let qtq = &q.transpose() * q;
        let ktk = &k.transpose() * k;
        let qtk = &q.transpose() * k;
        let btk = &b.transpose() * k;
        assert!((&qtq - &DenseMatrix::identity(q.cols())).norm_max() < 1e-12);
        assert!((&ktk - &DenseMatrix::identity(k.cols())).norm_max() < 1e-12);
        assert!(qtk.norm_max() < 1e-12);
        assert!(btk.norm_max() <= 1e-10 * b.norm_fro().max(1.0));
    }

    #[test]
    fn coordinate_axis() {
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]).unwrap();
        let s = orthonormal_range_and_complement(&b, None).unwrap();
        assert_eq!(s.rank, 1);
        assert_eq!(s.complement.cols(), 2);
        assert!((s.range[(0, 0)].abs() - 1.0).abs() < 1e-15);
        check_split(&b, &s);
    }

    #[test]
    fn hand_vector_123() {
        // Complement of span{(1,2,3)} is the plane x1 + 2x2 + 3x3 = 0.
        let b = DenseMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let s = orthonormal_range_and_complement(&b, None).unwrap();
        assert_eq!(s.rank, 1);
        for j in 0..2 {
            let c = s.complement.column(j);
            assert!((c[0] + 2.0 * c[1] + 3.0 * c[2]).abs() < 1e-14);
        }
        check_split(&b, &s);
    }

    #[test]
    fn zero_matrix_rank_zero() {
        let b = DenseMatrix::zeros(4, 2);
        let s = orthonormal_range_and_complement(&b, None).unwrap();
        assert_eq!(s.rank, 0);
        assert_eq!(s.complement.cols(), 4);
        check_split(&b, &s);
    }

    #[test]
    fn orthonormalize_rejects_rank_deficiency() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        assert!(orthonormalize_columns(&a).is_err());
        let ok = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 0.0], vec![1.0, 2.0]]).unwrap();
        let q = orthonormalize_columns(&ok).unwrap();
        let qtq = &q.transpose() * &q;
        assert!((&qtq - &DenseMatrix::identity(2)).norm_max() < 1e-14);
    }

    #[test]
    fn qr_square_reconstructs() {
        let a = DenseMatrix::from_fn(5, 5, |i, j| ((i * 5 + j * 3 + 1) % 7) as f64 - 3.0);
        let (q, r) = qr_square(&a);
        let qr = &q * &r;
        assert!((&qr - &a).norm_max() < 1e-12);
        for k in 0..5 {
            assert!(r[(k, k)] >= 0.0);
        }
    }
}
