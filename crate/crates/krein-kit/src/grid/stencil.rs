//! Finite-difference assembly for the clamped-column and clamped-plate
//! instances, plus the independent 13-point cross-check pencil.

use super::GridError;
use crate::extension::RestrictedOperator;
use crate::linalg::{min_eigenvalue, DenseMatrix, SparseSymMatrix};
use crate::provenance::Provenance;

/// Second-difference matrix `(2, -1)/h²` on `n` interior nodes with Dirichlet
/// closure, as sparse triplets.
fn second_difference_triplets(n: usize, h: f64) -> Vec<(usize, usize, f64)> {
    let s = 1.0 / (h * h);
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        t.push((i, i, 2.0 * s));
        if i + 1 < n {
            t.push((i, i + 1, -s));
            t.push((i + 1, i, -s));
        }
    }
    t
}

/// Five-point Laplacian on an `nx` by `ny` interior grid with Dirichlet
/// closure and spacings `hx`, `hy` (lexicographic index `i * ny + j`).
fn five_point_triplets(nx: usize, ny: usize, hx: f64, hy: f64) -> Vec<(usize, usize, f64)> {
    let sx = 1.0 / (hx * hx);
    let sy = 1.0 / (hy * hy);
    let idx = |i: usize, j: usize| i * ny + j;
    let mut t = Vec::with_capacity(5 * nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            t.push((idx(i, j), idx(i, j), 2.0 * sx + 2.0 * sy));
            if i + 1 < nx {
                t.push((idx(i, j), idx(i + 1, j), -sx));
                t.push((idx(i + 1, j), idx(i, j), -sx));
            }
            if j + 1 < ny {
                t.push((idx(i, j), idx(i, j + 1), -sy));
                t.push((idx(i, j + 1), idx(i, j), -sy));
            }
        }
    }
    t
}

fn deep_indices_1d(n: usize) -> Vec<usize> {
    (1..n - 1).collect()
}

fn deep_indices_2d(nx: usize, ny: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity((nx - 2) * (ny - 2));
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            idx.push(i * ny + j);
        }
    }
    idx
}

/// Restrict a sparse operator and its square to a column subset:
/// `G = (A²)|deep`, `M = A|deep`.
fn restricted_pencil(
    a: &SparseSymMatrix,
    deep: &[usize],
) -> Result<(SparseSymMatrix, SparseSymMatrix), GridError> {
    let n = a.dim();
    let mut pos = vec![usize::MAX; n];
    for (k, &i) in deep.iter().enumerate() {
        pos[i] = k;
    }
    let d = deep.len();
    let mut g_trip = Vec::new();
    let mut m_trip = Vec::new();
    // one dense accumulator row, reused
    let mut acc = vec![0.0f64; n];
    for (ii, &i) in deep.iter().enumerate() {
        // row i of A²
        let (cols_i, vals_i) = a.row(i);
        let mut touched = Vec::new();
        for (&k, &v) in cols_i.iter().zip(vals_i) {
            let (cols_k, vals_k) = a.row(k);
            for (&j, &w) in cols_k.iter().zip(vals_k) {
                if acc[j] == 0.0 {
                    touched.push(j);
                }
                acc[j] += v * w;
            }
        }
        touched.sort_unstable();
        for &j in &touched {
            if pos[j] != usize::MAX && acc[j] != 0.0 {
                g_trip.push((ii, pos[j], acc[j]));
            }
            acc[j] = 0.0;
        }
        for (&j, &v) in cols_i.iter().zip(vals_i) {
            if pos[j] != usize::MAX {
                m_trip.push((ii, pos[j], v));
            }
        }
    }
    Ok((
        SparseSymMatrix::from_triplets(d, &g_trip)?,
        SparseSymMatrix::from_triplets(d, &m_trip)?,
    ))
}

fn operator_from_sparse(
    a: &SparseSymMatrix,
    deep: &[usize],
    provenance: Provenance,
) -> Result<RestrictedOperator, GridError> {
    let n = a.dim();
    let d = deep.len();
    let mut e = DenseMatrix::zeros(n, d);
    let mut b = DenseMatrix::zeros(n, d);
    for (jj, &j) in deep.iter().enumerate() {
        e[(j, jj)] = 1.0;
        // column j of A
        let (cols, vals) = a.row(j);
        for (&i, &v) in cols.iter().zip(vals) {
            b[(i, jj)] = v;
        }
    }
    let m = e.transpose().matmul(&b).symmetrize();
    let epsilon = min_eigenvalue(&m)?;
    Ok(RestrictedOperator::from_parts(e, b, epsilon, provenance)?)
}

/// 1D clamped column: the second-difference operator on `n` interior nodes,
/// restricted to grid functions vanishing at the boundary-adjacent nodes.
/// Deficiency is exactly 2; the adjoint kernel is spanned by the affine grid
/// sequences.
pub fn interval_minimal_laplacian(n: usize) -> Result<RestrictedOperator, GridError> {
    if n < 5 {
        return Err(GridError::GridTooSmall { got: n });
    }
    let h = 1.0 / (n as f64 + 1.0);
    let a = SparseSymMatrix::from_triplets(n, &second_difference_triplets(n, h))?;
    operator_from_sparse(&a, &deep_indices_1d(n), Provenance::Interval { nodes: n })
}

/// 2D clamped plate on the unit square: the five-point Laplacian on an
/// `nx` by `ny` interior grid, restricted to deep-interior unit vectors (no
/// 4-neighbor touches the boundary). The adjoint kernel consists of the
/// discretely harmonic functions on the deep interior.
pub fn rectangle_minimal_laplacian(nx: usize, ny: usize) -> Result<RestrictedOperator, GridError> {
    rectangle_minimal_laplacian_sized(nx, ny, 1.0, 1.0)
}

pub(super) fn rectangle_minimal_laplacian_sized(
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
) -> Result<RestrictedOperator, GridError> {
    if nx < 5 || ny < 5 {
        return Err(GridError::GridTooSmall { got: nx.min(ny) });
    }
    let hx = lx / (nx as f64 + 1.0);
    let hy = ly / (ny as f64 + 1.0);
    let a = SparseSymMatrix::from_triplets(nx * ny, &five_point_triplets(nx, ny, hx, hy))?;
    operator_from_sparse(
        &a,
        &deep_indices_2d(nx, ny),
        Provenance::Rectangle { nx, ny, lx, ly },
    )
}

/// Sparse pencil `(G, M)` for the 1D instance, for the iterative eigenpath.
pub fn interval_pencil_sparse(
    n: usize,
) -> Result<(SparseSymMatrix, SparseSymMatrix), GridError> {
    if n < 5 {
        return Err(GridError::GridTooSmall { got: n });
    }
    let h = 1.0 / (n as f64 + 1.0);
    let a = SparseSymMatrix::from_triplets(n, &second_difference_triplets(n, h))?;
    restricted_pencil(&a, &deep_indices_1d(n))
}

/// Sparse pencil `(G, M)` for the 2D instance, for the iterative eigenpath.
pub fn rectangle_pencil_sparse(
    nx: usize,
    ny: usize,
) -> Result<(SparseSymMatrix, SparseSymMatrix), GridError> {
    if nx < 5 || ny < 5 {
        return Err(GridError::GridTooSmall { got: nx.min(ny) });
    }
    let hx = 1.0 / (nx as f64 + 1.0);
    let hy = 1.0 / (ny as f64 + 1.0);
    let a = SparseSymMatrix::from_triplets(nx * ny, &five_point_triplets(nx, ny, hx, hy))?;
    restricted_pencil(&a, &deep_indices_2d(nx, ny))
}

/// Independent cross-check for the unit-square plate: the classical 13-point
/// bilaplacian with clamped boundary (zero values on the boundary ring, ghost
/// values reflected across it), paired with the five-point Laplacian. This
/// assembly shares no code with the deep-interior restriction above.
pub fn clamped_plate_cross_pencil(n: usize) -> Result<(DenseMatrix, DenseMatrix), GridError> {
    if n < 5 {
        return Err(GridError::GridTooSmall { got: n });
    }
    let h = 1.0 / (n as f64 + 1.0);
    let h4 = h * h * h * h;
    let nn = n as isize;
    let idx = |i: isize, j: isize| (i * nn + j) as usize;
    let stencil: [(isize, isize, f64); 13] = [
        (0, 0, 20.0),
        (1, 0, -8.0),
        (-1, 0, -8.0),
        (0, 1, -8.0),
        (0, -1, -8.0),
        (1, 1, 2.0),
        (1, -1, 2.0),
        (-1, 1, 2.0),
        (-1, -1, 2.0),
        (2, 0, 1.0),
        (-2, 0, 1.0),
        (0, 2, 1.0),
        (0, -2, 1.0),
    ];
    // coordinate map: -1 and n are the boundary ring (value zero, dropped);
    // -2 and n+1 are ghosts, reflected to 0 and n-1.
    let reflect = |c: isize| -> Option<isize> {
        match c {
            -2 => Some(0),
            -1 => None,
            c if c == nn => None,
            c if c == nn + 1 => Some(nn - 1),
            c => Some(c),
        }
    };
    let mut g = DenseMatrix::zeros(n * n, n * n);
    for i in 0..nn {
        for j in 0..nn {
            for &(di, dj, v) in &stencil {
                if let (Some(ii), Some(jj)) = (reflect(i + di), reflect(j + dj)) {
                    g[(idx(i, j), idx(ii, jj))] += v / h4;
                }
            }
        }
    }
    let m5 = SparseSymMatrix::from_triplets(n * n, &five_point_triplets(n, n, h, h))?;
    Ok((g.symmetrize(), m5.to_dense()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eig;

    #[test]
    fn interval_counts_and_kernel() {
        let op = interval_minimal_laplacian(6).unwrap();
        assert_eq!(op.ambient_dim(), 6);
        assert_eq!(op.domain_dim(), 4);
        assert_eq!(op.deficiency(), 2);

        // the adjoint kernel consists of affine sequences: check that both
        // the constant and the linear ramp are orthogonal to every image
        // column (their second differences vanish on nodes 2..n-1)
        let ones = vec![1.0; 6];
        let ramp: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let bt_ones = op.image().tr_matvec(&ones);
        let bt_ramp = op.image().tr_matvec(&ramp);
        let scale = op.image().norm_fro();
        assert!(bt_ones.iter().all(|x| x.abs() < 1e-10 * scale));
        assert!(bt_ramp.iter().all(|x| x.abs() < 1e-10 * scale));
    }

    #[test]
    fn interval_too_small() {
        assert!(matches!(interval_minimal_laplacian(4), Err(GridError::GridTooSmall { .. })));
    }

    #[test]
    fn rectangle_counts() {
        let op = rectangle_minimal_laplacian(7, 7).unwrap();
        assert_eq!(op.ambient_dim(), 49);
        assert_eq!(op.domain_dim(), 25);
        assert_eq!(op.deficiency(), 24);
        assert!(matches!(
            rectangle_minimal_laplacian(4, 7),
            Err(GridError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn rectangle_kernel_is_discretely_harmonic() {
        let op = rectangle_minimal_laplacian(7, 7).unwrap();
        let kernel = crate::extension::adjoint_kernel(&op).unwrap();
        assert_eq!(kernel.cols(), 24);
        // every kernel column must be annihilated by the five-point stencil
        // at all deep-interior nodes; that is exactly Bᵀk = 0
        let btk = op.image().transpose().matmul(&kernel);
        assert!(btk.norm_max() < 1e-8 * op.image().norm_max());
    }

    #[test]
    fn sparse_pencil_matches_dense_assembly() {
        let op = interval_minimal_laplacian(12).unwrap();
        let (g, m) = interval_pencil_sparse(12).unwrap();
        let b = op.image();
        let g_dense = b.transpose().matmul(b);
        let m_dense = op.compression();
        assert!((&g.to_dense() - &g_dense).norm_max() < 1e-9 * g_dense.norm_max());
        assert!((&m.to_dense() - &m_dense).norm_max() < 1e-9 * m_dense.norm_max());

        let op2 = rectangle_minimal_laplacian(6, 7).unwrap();
        let (g2, m2) = rectangle_pencil_sparse(6, 7).unwrap();
        let g2_dense = op2.image().transpose().matmul(op2.image());
        assert!((&g2.to_dense() - &g2_dense).norm_max() < 1e-9 * g2_dense.norm_max());
        assert!((&m2.to_dense() - &op2.compression()).norm_max() < 1e-9);
    }

    #[test]
    fn cross_pencil_is_symmetric_pd() {
        let (g, m) = clamped_plate_cross_pencil(8).unwrap();
        assert!(g.max_asymmetry() < 1e-9 * g.norm_max());
        let ge = sym_eig(&g).unwrap();
        let me = sym_eig(&m).unwrap();
        assert!(ge.values[0] > 0.0);
        assert!(me.values[0] > 0.0);
    }
}
