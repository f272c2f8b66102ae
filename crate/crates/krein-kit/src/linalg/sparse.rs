//! Sparse symmetric matrices (CSR, full pattern) and a band Cholesky solver.

use super::LinalgError;

/// Symmetric sparse matrix in CSR form. Both triangles are stored; symmetry is
/// the caller's responsibility and can be spot-checked with
/// [`SparseSymMatrix::max_asymmetry`].
#[derive(Debug, Clone)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Build from triplets; duplicate entries are summed, explicit zeros kept.
    pub fn from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self, LinalgError> {
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(LinalgError::DimensionMismatch {
                    context: format!("from_triplets: ({i},{j}) outside {n}x{n}"),
                });
            }
            if !v.is_finite() {
                return Err(LinalgError::NonFinite { context: "from_triplets".into() });
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut next_row = 0usize;
        let mut last: Option<(usize, usize)> = None;
        for &(i, j, v) in &sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            while next_row <= i {
                row_ptr[next_row] = col_idx.len();
                next_row += 1;
            }
            col_idx.push(j);
            values.push(v);
            last = Some((i, j));
        }
        while next_row <= n {
            row_ptr[next_row] = col_idx.len();
            next_row += 1;
        }
        Ok(Self { n, row_ptr, col_idx, values })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n, "sparse matvec dimension mismatch");
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            y[i] = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
        y
    }

    pub fn norm_fro(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for i in 0..self.n {
            for &j in self.row(i).0 {
                bw = bw.max(i.abs_diff(j));
            }
        }
        bw
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, j, v) in self.triplets() {
            if j > i {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// `self + alpha * other`, merging patterns.
    pub fn add_scaled(&self, other: &Self, alpha: f64) -> Result<Self, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch {
                context: format!("add_scaled: {} vs {}", self.n, other.n),
            });
        }
        let mut trip: Vec<(usize, usize, f64)> = self.triplets().collect();
        trip.extend(other.triplets().map(|(i, j, v)| (i, j, alpha * v)));
        Self::from_triplets(self.n, &trip)
    }

    pub fn to_dense(&self) -> super::matrix::DenseMatrix {
        let mut m = super::matrix::DenseMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    pub fn from_dense(m: &super::matrix::DenseMatrix, drop_tol: f64) -> Result<Self, LinalgError> {
        if !m.is_square() {
            return Err(LinalgError::NonSquare { rows: m.rows(), cols: m.cols() });
        }
        let mut trip = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m[(i, j)].abs() > drop_tol {
                    trip.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.rows(), &trip)
    }
}

/// Lower-band Cholesky factor of a banded SPD matrix.
///
/// Storage is `data[i * (w + 1) + k] = L[i, i - k]` for `k <= min(i, w)`.
pub struct BandCholesky {
    n: usize,
    w: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    /// Factor a sparse SPD matrix through its band envelope. Intended for
    /// grid-ordered matrices where the natural bandwidth is moderate.
    pub fn factor(a: &SparseSymMatrix) -> Result<Self, LinalgError> {
        let n = a.dim();
        let w = a.bandwidth();
        let stride = w + 1;
        let mut band = vec![0.0f64; n * stride];
        for (i, j, v) in a.triplets() {
            if j <= i {
                band[i * stride + (i - j)] = v;
            }
        }
        // in-place band Cholesky
        for i in 0..n {
            let lo = i.saturating_sub(w);
            let mut s = band[i * stride];
            for k in lo..i {
                let lik = band[i * stride + (i - k)];
                s -= lik * lik;
            }
            if s <= 0.0 || !s.is_finite() {
                return Err(LinalgError::NotPositiveDefinite { min_eigenvalue: s });
            }
            let lii = s.sqrt();
            band[i * stride] = lii;
            let hi = (i + w + 1).min(n);
            for j in (i + 1)..hi {
                let mut acc = band[j * stride + (j - i)];
                let klo = lo.max(j.saturating_sub(w));
                for k in klo..i {
                    acc -= band[i * stride + (i - k)] * band[j * stride + (j - k)];
                }
                band[j * stride + (j - i)] = acc / lii;
            }
        }
        Ok(Self { n, w, data: band })
    }

    /// Solve `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n, "band solve dimension mismatch");
        let stride = self.w + 1;
        let mut x = b.to_vec();
        for i in 0..self.n {
            let lo = i.saturating_sub(self.w);
            let mut s = x[i];
            for k in lo..i {
                s -= self.data[i * stride + (i - k)] * x[k];
            }
            x[i] = s / self.data[i * stride];
        }
        for i in (0..self.n).rev() {
            let hi = (i + self.w + 1).min(self.n);
            let mut s = x[i];
            for j in (i + 1)..hi {
                s -= self.data[j * stride + (j - i)] * x[j];
            }
            x[i] = s / self.data[i * stride];
        }
        x
    }
}
