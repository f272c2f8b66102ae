//! Generalized symmetric-definite eigenproblem `G c = λ M c`.

use super::eigen::sym_eig;
use super::matrix::DenseMatrix;
use super::qr::fix_column_signs;
use super::LinalgError;

/// Eigenpairs of a symmetric-definite pencil: ascending values, columns of
/// `vectors` normalized to `cᵀMc = 1` with the crate sign convention.
#[derive(Debug, Clone)]
pub struct PencilEigs {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl PencilEigs {
    /// Max residual `‖Gc - λMc‖ / (‖G‖ + λ‖M‖)` over all pairs.
    pub fn max_relative_residual(&self, g: &DenseMatrix, m: &DenseMatrix) -> f64 {
        let gn = g.norm_fro();
        let mn = m.norm_fro();
        let mut worst = 0.0f64;
        for (j, &lam) in self.values.iter().enumerate() {
            let c = self.vectors.column(j);
            let gc = g.matvec(&c);
            let mc = m.matvec(&c);
            let r: f64 = gc
                .iter()
                .zip(&mc)
                .map(|(a, b)| (a - lam * b) * (a - lam * b))
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r / (gn + lam.abs() * mn));
        }
        worst
    }
}

/// Solve `G c = λ M c` for symmetric `G` and symmetric positive definite `M`
/// by Cholesky reduction: with `M = LLᵀ` the pencil becomes the ordinary
/// symmetric problem for `L⁻¹ G L⁻ᵀ`, whose eigenvectors are mapped back by
/// `c = L⁻ᵀ y`.
pub fn gen_sym_eig(g: &DenseMatrix, m: &DenseMatrix) -> Result<PencilEigs, LinalgError> {
    if !g.is_square() {
        return Err(LinalgError::NonSquare { rows: g.rows(), cols: g.cols() });
    }
    if g.rows() != m.rows() || g.cols() != m.cols() {
        return Err(LinalgError::DimensionMismatch {
            context: format!("gen_sym_eig: {}x{} vs {}x{}", g.rows(), g.cols(), m.rows(), m.cols()),
        });
    }
    if !g.all_finite() || !m.all_finite() {
        return Err(LinalgError::NonFinite { context: "gen_sym_eig input".into() });
    }
    let n = g.rows();
    if n == 0 {
        return Ok(PencilEigs { values: vec![], vectors: DenseMatrix::zeros(0, 0) });
    }

    let chol = nalgebra::Cholesky::new(m.symmetrize().to_nalgebra())
        .ok_or(LinalgError::NotPositiveDefinite { min_eigenvalue: f64::NAN })?;
    let l = chol.l();

    // W = L⁻¹ G L⁻ᵀ
    let g_na = g.symmetrize().to_nalgebra();
    let y = l
        .solve_lower_triangular(&g_na)
        .ok_or(LinalgError::NotPositiveDefinite { min_eigenvalue: f64::NAN })?;
    let w = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(LinalgError::NotPositiveDefinite { min_eigenvalue: f64::NAN })?;
    let w_dm = DenseMatrix::from_nalgebra(&w).symmetrize();

    let eig = sym_eig(&w_dm)?;

    // back-transform: c = L⁻ᵀ y
    let lt = l.transpose();
    let y_na = eig.vectors.to_nalgebra();
    let c = lt
        .solve_upper_triangular(&y_na)
        .ok_or(LinalgError::NotPositiveDefinite { min_eigenvalue: f64::NAN })?;
    let mut vectors = DenseMatrix::from_nalgebra(&c);

    // re-normalize in the M inner product and re-apply the sign convention
    for j in 0..n {
        let col = vectors.column(j);
        let mc = m.matvec(&col);
        let nrm = super::matrix::dot(&col, &mc).sqrt();
        if nrm > 0.0 {
            let scaled: Vec<f64> = col.iter().map(|x| x / nrm).collect();
            vectors.set_column(j, &scaled);
        }
    }
    fix_column_signs(&mut vectors);

    if !vectors.all_finite() {
        return Err(LinalgError::NonFinite { context: "gen_sym_eig output".into() });
    }
    Ok(PencilEigs { values: eig.values, vectors })
}
