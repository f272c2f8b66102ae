//! The two extremal extensions and the identities connecting them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{ExtensionError, RestrictedOperator};
use crate::config::Tolerances;
use crate::linalg::{
    dot, linear_solve_with, min_eigenvalue, orthonormal_range_and_complement, spd_inverse,
    sym_eig, DenseMatrix,
};

/// Everything the verification identities need, built once per instance:
/// the Krein extension `SK`, the inverse `F` of the Friedrichs extension,
/// an orthonormal basis `K` of the adjoint kernel, and an orthonormal basis
/// `Q` of the range of the operator.
#[derive(Debug, Clone)]
pub struct ExtensionBundle {
    krein: DenseMatrix,
    friedrichs_inverse: DenseMatrix,
    kernel: DenseMatrix,
    range: DenseMatrix,
}

impl ExtensionBundle {
    pub fn new(op: &RestrictedOperator, tol: &Tolerances) -> Result<Self, ExtensionError> {
        let kernel = adjoint_kernel(op)?;
        let range_split = orthonormal_range_and_complement(op.image(), None)?;
        let krein = krein_extension_with(op, &kernel, tol)?;
        let friedrichs_inverse = friedrichs_inverse_matrix(op, tol)?;
        Ok(Self { krein, friedrichs_inverse, kernel, range: range_split.range })
    }

    /// The Krein extension `SK`: symmetric PSD, acts as `S` on the domain and
    /// as zero on the adjoint kernel. Exactly `d` nonzero eigenvalues.
    pub fn krein(&self) -> &DenseMatrix {
        &self.krein
    }

    /// Inverse `F` of the Friedrichs extension: symmetric PSD with
    /// `F (B c) = E c` and `ker F = D^⊥`.
    pub fn friedrichs_inverse(&self) -> &DenseMatrix {
        &self.friedrichs_inverse
    }

    /// Orthonormal basis of `ker(S*) = ran(S)^⊥`, `n x (n-d)`.
    pub fn kernel(&self) -> &DenseMatrix {
        &self.kernel
    }

    /// Orthonormal basis of `ran(S)`, `n x d`.
    pub fn range(&self) -> &DenseMatrix {
        &self.range
    }
}

/// Orthonormal basis of the adjoint kernel, computed as the orthogonal
/// complement of the image columns.
pub fn adjoint_kernel(op: &RestrictedOperator) -> Result<DenseMatrix, ExtensionError> {
    let split = orthonormal_range_and_complement(op.image(), None)?;
    if split.rank != op.domain_dim() {
        return Err(ExtensionError::IllConditionedDecomposition {
            condition: f64::INFINITY,
            cap: 0.0,
        });
    }
    Ok(split.complement)
}

/// The Krein extension as an `n x n` matrix, solved from its defining action
/// `SK [E K] = [B 0]`. The concatenation `[E K]` is invertible because the
/// domain meets the orthogonal complement of the range trivially under strict
/// positivity.
pub fn krein_extension(op: &RestrictedOperator) -> Result<DenseMatrix, ExtensionError> {
    let kernel = adjoint_kernel(op)?;
    krein_extension_with(op, &kernel, &Tolerances::default())
}

fn krein_extension_with(
    op: &RestrictedOperator,
    kernel: &DenseMatrix,
    tol: &Tolerances,
) -> Result<DenseMatrix, ExtensionError> {
    let n = op.ambient_dim();
    let basis = DenseMatrix::hstack(&[op.domain_basis(), kernel]);
    check_condition(&basis, tol)?;
    let rhs = DenseMatrix::hstack(&[op.image(), &DenseMatrix::zeros(n, op.deficiency())]);
    // SK = [B 0] [E K]⁻¹  ⇔  [E K]ᵀ SKᵀ = [B 0]ᵀ
    let sk_t = linear_solve_with(&basis.transpose(), &rhs.transpose(), tol)?;
    Ok(sk_t.transpose().symmetrize())
}

/// The inverse of the Friedrichs extension as an `n x n` matrix, solved from
/// `F [B N] = [E 0]` with `N` an orthonormal basis of `D^⊥`. The Friedrichs
/// object itself is a self-adjoint relation (it sends `v ∈ D` to `Sv + D^⊥`);
/// its inverse is this genuine operator.
pub fn friedrichs_inverse(op: &RestrictedOperator) -> Result<DenseMatrix, ExtensionError> {
    friedrichs_inverse_matrix(op, &Tolerances::default())
}

fn friedrichs_inverse_matrix(
    op: &RestrictedOperator,
    tol: &Tolerances,
) -> Result<DenseMatrix, ExtensionError> {
    let n = op.ambient_dim();
    let complement = domain_complement(op)?;
    let basis = DenseMatrix::hstack(&[op.image(), &complement]);
    check_condition(&basis, tol)?;
    let rhs = DenseMatrix::hstack(&[op.domain_basis(), &DenseMatrix::zeros(n, op.deficiency())]);
    let f_t = linear_solve_with(&basis.transpose(), &rhs.transpose(), tol)?;
    Ok(f_t.transpose().symmetrize())
}

/// Orthonormal basis of `D^⊥`.
pub fn domain_complement(op: &RestrictedOperator) -> Result<DenseMatrix, ExtensionError> {
    let split = orthonormal_range_and_complement(op.domain_basis(), None)?;
    if split.rank != op.domain_dim() {
        return Err(ExtensionError::IllConditionedDecomposition {
            condition: f64::INFINITY,
            cap: 0.0,
        });
    }
    Ok(split.complement)
}

fn check_condition(basis: &DenseMatrix, tol: &Tolerances) -> Result<(), ExtensionError> {
    let gram = basis.transpose().matmul(basis).symmetrize();
    let eig = sym_eig(&gram)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    let max = eig.values.last().copied().unwrap_or(0.0);
    if min <= 0.0 {
        return Err(ExtensionError::IllConditionedDecomposition {
            condition: f64::INFINITY,
            cap: tol.condition_cap,
        });
    }
    let condition = (max / min).sqrt();
    if condition > tol.condition_cap {
        return Err(ExtensionError::IllConditionedDecomposition {
            condition,
            cap: tol.condition_cap,
        });
    }
    Ok(())
}

/// Resolvent of the Friedrichs extension at `-a`, `a > 0`:
/// `E (M + aI)⁻¹ Eᵀ`. Symmetric PSD of rank `d`, converging to the
/// Friedrichs inverse as `a → 0`.
pub fn friedrichs_resolvent(
    op: &RestrictedOperator,
    a: f64,
) -> Result<DenseMatrix, ExtensionError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(ExtensionError::NonpositiveShift { a });
    }
    let m = op.compression().add_scaled_identity(a);
    let inv = spd_inverse(&m)?;
    let e = op.domain_basis();
    Ok(e.matmul(&inv).matmul(&e.transpose()).symmetrize())
}

/// The inverse of the Krein extension restricted to the orthogonal complement
/// of its kernel, in range coordinates: `R = Qᵀ F Q`. Symmetric positive
/// definite, and the exact inverse of `Qᵀ SK Q`.
pub fn reduced_krein_inverse(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
) -> Result<DenseMatrix, ExtensionError> {
    let _ = op;
    let q = bundle.range();
    Ok(q.transpose().matmul(bundle.friedrichs_inverse()).matmul(q).symmetrize())
}

/// Splitting of a vector into its domain and adjoint-kernel parts,
/// `v = u + w` with `u ∈ D` and `w ⊥ ran(S)`.
#[derive(Debug, Clone)]
pub struct DomainDecomposition {
    pub domain_part: Vec<f64>,
    pub kernel_part: Vec<f64>,
}

/// Decompose `v` as `u + w` with `u = F · SK · v ∈ D` and `w = v - u` in the
/// adjoint kernel. The splitting is unique because `D` and `ran(S)^⊥`
/// intersect trivially.
pub fn domain_decompose(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    v: &[f64],
) -> Result<DomainDecomposition, ExtensionError> {
    if v.len() != op.ambient_dim() {
        return Err(ExtensionError::Shape {
            context: format!("domain_decompose: vector length {} != n={}", v.len(), op.ambient_dim()),
        });
    }
    let sk_v = bundle.krein().matvec(v);
    let u = bundle.friedrichs_inverse().matvec(&sk_v);
    let w: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a - b).collect();
    Ok(DomainDecomposition { domain_part: u, kernel_part: w })
}

/// Ascending eigenvalue sequences of the two extremal extensions and the
/// outcome of the ordering test `ε ≤ μ_F,j ≤ μ_K,j`.
#[derive(Debug, Clone)]
pub struct EigenvalueOrdering {
    /// Eigenvalues of the Friedrichs operator part (eigenvalues of `M`).
    pub friedrichs: Vec<f64>,
    /// Nonzero eigenvalues of the Krein extension.
    pub krein: Vec<f64>,
    pub ordered: bool,
}

/// Compare the first `j_max` eigenvalues of the Friedrichs operator part with
/// the nonzero Krein eigenvalues. The Friedrichs values are the reciprocals of
/// the nonzero eigenvalues of `F`.
pub fn eigenvalue_ordering(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    j_max: usize,
) -> Result<EigenvalueOrdering, ExtensionError> {
    let d = op.domain_dim();
    if j_max > d {
        return Err(ExtensionError::JOutOfRange { j_max, d });
    }
    let mu_f_all = sym_eig(&op.compression())?.values;
    let sk_eigs = sym_eig(bundle.krein())?.values;
    let mu_k_all = &sk_eigs[op.deficiency()..];

    let friedrichs: Vec<f64> = mu_f_all[..j_max].to_vec();
    let krein: Vec<f64> = mu_k_all[..j_max].to_vec();
    let eps = op.epsilon();
    let tol = Tolerances::default();
    let ordered = friedrichs.iter().zip(&krein).all(|(&mf, &mk)| {
        mf >= eps * (1.0 - 1e-12) && mf <= mk * (1.0 + tol.mu_ordering)
    });
    Ok(EigenvalueOrdering { friedrichs, krein, ordered })
}

/// Test the resolvent-order sandwich at shift `a > 0` for a candidate
/// extension: `(S_F + a)⁻¹ ⪯ (S̃ + a)⁻¹ ⪯ (SK + a)⁻¹` in the positive
/// semidefinite order. Returns whether both inequalities hold within the
/// configured slack.
pub fn extension_order_check(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    s_tilde: &DenseMatrix,
    a: f64,
) -> Result<bool, ExtensionError> {
    extension_order_check_with(op, bundle, s_tilde, a, &Tolerances::default())
}

pub fn extension_order_check_with(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    s_tilde: &DenseMatrix,
    a: f64,
    tol: &Tolerances,
) -> Result<bool, ExtensionError> {
    Ok(resolvent_sandwich_margin(op, bundle, s_tilde, a, tol)? >= -tol.resolvent_sandwich)
}

/// Smallest normalized eigenvalue over the two resolvent differences; the
/// sandwich holds when this is not meaningfully negative.
pub fn resolvent_sandwich_margin(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    s_tilde: &DenseMatrix,
    a: f64,
    tol: &Tolerances,
) -> Result<f64, ExtensionError> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(ExtensionError::NonpositiveShift { a });
    }
    let b = op.image();
    let ext_resid = (&s_tilde.matmul(op.domain_basis()) - b).norm_fro();
    if ext_resid > 1e-8 * b.norm_fro() {
        return Err(ExtensionError::NotAnExtension { residual: ext_resid });
    }
    let psd_slack = min_eigenvalue(s_tilde)?;
    if psd_slack < -tol.resolvent_sandwich * s_tilde.norm_fro().max(1.0) {
        return Err(ExtensionError::NotAnExtension { residual: -psd_slack });
    }

    let r_f = friedrichs_resolvent(op, a)?;
    let r_t = spd_inverse(&s_tilde.add_scaled_identity(a))?;
    let r_k = spd_inverse(&bundle.krein().add_scaled_identity(a))?;

    let lower = &r_t - &r_f;
    let upper = &r_k - &r_t;
    let scale_lower = r_t.norm_fro().max(r_f.norm_fro());
    let scale_upper = r_k.norm_fro().max(r_t.norm_fro());
    let m1 = min_eigenvalue(&lower.symmetrize())? / scale_lower;
    let m2 = min_eigenvalue(&upper.symmetrize())? / scale_upper;
    Ok(m1.min(m2))
}

/// Seeded family of valid extensions: `S̃ = SK + N W Nᵀ` with `N` an
/// orthonormal basis of `D^⊥` and `W` random positive semidefinite. Adding on
/// `D^⊥` preserves the extension property `S̃ E = B`, and every such matrix is
/// positive semidefinite.
pub fn random_extensions(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    count: usize,
    seed: u64,
) -> Result<Vec<DenseMatrix>, ExtensionError> {
    let complement = domain_complement(op)?;
    let k = op.deficiency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = bundle.krein().norm_fro().max(1.0) / (k as f64);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let z = DenseMatrix::from_fn(k, k, |_, _| StandardNormal.sample(&mut rng));
        let w = z.matmul(&z.transpose()).scale(scale);
        let bump = complement.matmul(&w).matmul(&complement.transpose());
        out.push((bundle.krein() + &bump).symmetrize());
    }
    Ok(out)
}

/// Relative residual of the extension property `SK E = B`.
pub fn extension_property_residual(op: &RestrictedOperator, bundle: &ExtensionBundle) -> f64 {
    let diff = &bundle.krein().matmul(op.domain_basis()) - op.image();
    diff.norm_fro() / op.image().norm_fro().max(f64::MIN_POSITIVE)
}

/// Relative Krein-formula residual `‖QᵀFQ - (QᵀSKQ)⁻¹‖ / ‖F‖`.
pub fn krein_formula_residual(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
) -> Result<f64, ExtensionError> {
    let reduced = reduced_krein_inverse(op, bundle)?;
    let q = bundle.range();
    let compressed = q.transpose().matmul(bundle.krein()).matmul(q).symmetrize();
    let pinv = spd_inverse(&compressed)?;
    let resid = (&reduced - &pinv).norm_fro();
    Ok(resid / bundle.friedrichs_inverse().norm_fro().max(f64::MIN_POSITIVE))
}

/// `‖u‖` of the difference between two decompositions of the same vector is
/// zero; exposed mainly for the property tests.
pub fn decomposition_residual(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    v: &[f64],
) -> Result<f64, ExtensionError> {
    let dec = domain_decompose(op, bundle, v)?;
    let n = op.ambient_dim();
    // u must lie in ran(E): residual of projection
    let e = op.domain_basis();
    let coords = e.tr_matvec(&dec.domain_part);
    let proj = e.matvec(&coords);
    let off_domain: f64 = dec
        .domain_part
        .iter()
        .zip(&proj)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    // w must be orthogonal to ran(B)
    let bt_w = op.image().tr_matvec(&dec.kernel_part);
    let off_kernel = norm_of(&bt_w) / op.image().norm_fro().max(f64::MIN_POSITIVE);
    // exact additivity
    let mut add_err = 0.0f64;
    for i in 0..n {
        add_err = add_err.max((dec.domain_part[i] + dec.kernel_part[i] - v[i]).abs());
    }
    let scale = norm_of(v).max(f64::MIN_POSITIVE);
    Ok((off_domain / scale).max(off_kernel / scale.max(1.0)).max(add_err / scale))
}

fn norm_of(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provenance::Provenance;

    fn identity_restriction() -> RestrictedOperator {
        let a = DenseMatrix::identity(2);
        let span = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        RestrictedOperator::from_ambient(&a, &span, 0.0, Provenance::Ambient { label: "id".into() })
            .unwrap()
    }

    fn diag123() -> (DenseMatrix, RestrictedOperator) {
        let a = DenseMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let span = DenseMatrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let op = RestrictedOperator::from_ambient(
            &a,
            &span,
            0.0,
            Provenance::Ambient { label: "diag123".into() },
        )
        .unwrap();
        (a, op)
    }

    #[test]
    fn identity_restriction_extensions() {
        let op = identity_restriction();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let expect = DenseMatrix::diagonal(&[1.0, 0.0]);
        assert!((bundle.krein() - &expect).norm_max() < 1e-14);
        assert!((bundle.friedrichs_inverse() - &expect).norm_max() < 1e-14);
        let r = friedrichs_resolvent(&op, 1.0).unwrap();
        assert!((r[(0, 0)] - 0.5).abs() < 1e-14);
        assert!(r.norm_fro() - 0.5 < 1e-14);
        let reduced = reduced_krein_inverse(&op, &bundle).unwrap();
        assert!((reduced[(0, 0)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diag123_krein_eigenvalue() {
        let (_, op) = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let eigs = sym_eig(bundle.krein()).unwrap().values;
        assert!(eigs[0].abs() < 1e-12);
        assert!(eigs[1].abs() < 1e-12);
        assert!((eigs[2] - 7.0 / 3.0).abs() < 1e-12);
        // eigenvector proportional to (1,2,3)
        let v = sym_eig(bundle.krein()).unwrap().vectors.column(2);
        let scale = v[0];
        assert!((v[1] / scale - 2.0).abs() < 1e-10);
        assert!((v[2] / scale - 3.0).abs() < 1e-10);
    }

    #[test]
    fn diag123_friedrichs_inverse_action() {
        let (_, op) = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let f = bundle.friedrichs_inverse();
        // F B = E
        let fb = f.matmul(op.image());
        assert!((&fb - op.domain_basis()).norm_max() < 1e-12);
        // nonzero eigenvalue of F is 1/2
        let eigs = sym_eig(f).unwrap().values;
        assert!((eigs[2] - 0.5).abs() < 1e-13);
        assert!(eigs[1].abs() < 1e-13);
    }

    #[test]
    fn diag123_resolvent_is_ones_over_nine() {
        let (_, op) = diag123();
        let r = friedrichs_resolvent(&op, 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[(i, j)] - 1.0 / 9.0).abs() < 1e-14);
            }
        }
        assert!(matches!(
            friedrichs_resolvent(&op, 0.0),
            Err(ExtensionError::NonpositiveShift { .. })
        ));
    }

    #[test]
    fn diag123_reduced_inverse_and_formula() {
        let (_, op) = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let r = reduced_krein_inverse(&op, &bundle).unwrap();
        assert!((r[(0, 0)] - 3.0 / 7.0).abs() < 1e-12);
        assert!(krein_formula_residual(&op, &bundle).unwrap() < 1e-12);
    }

    #[test]
    fn diag123_ordering() {
        let (_, op) = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let ord = eigenvalue_ordering(&op, &bundle, 1).unwrap();
        assert!((ord.friedrichs[0] - 2.0).abs() < 1e-12);
        assert!((ord.krein[0] - 7.0 / 3.0).abs() < 1e-12);
        assert!(ord.ordered);
        assert!(matches!(
            eigenvalue_ordering(&op, &bundle, 2),
            Err(ExtensionError::JOutOfRange { .. })
        ));
    }

    #[test]
    fn decompose_domain_and_kernel_inputs() {
        let (_, op) = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        // kernel input: orthogonal to (1,2,3)
        let w = [2.0, -1.0, 0.0];
        let dec = domain_decompose(&op, &bundle, &w).unwrap();
        assert!(norm_of(&dec.domain_part) < 1e-12);
        // domain input
        let s3 = 3.0f64.sqrt();
        let u = [1.0 / s3, 1.0 / s3, 1.0 / s3];
        let dec = domain_decompose(&op, &bundle, &u).unwrap();
        assert!(norm_of(&dec.kernel_part) < 1e-12);
        // generic input decomposes consistently
        let v = [1.0, 2.0, 3.0];
        assert!(decomposition_residual(&op, &bundle, &v).unwrap() < 1e-12);
    }

    #[test]
    fn sandwich_on_diag123() {
        let (a, op) = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        for shift in [0.1, 1.0, 10.0] {
            assert!(extension_order_check(&op, &bundle, &a, shift).unwrap());
            assert!(extension_order_check(&op, &bundle, bundle.krein(), shift).unwrap());
        }
        for ext in random_extensions(&op, &bundle, 5, 7).unwrap() {
            assert!(extension_order_check(&op, &bundle, &ext, 1.0).unwrap());
        }
        // a non-extension is rejected
        let junk = DenseMatrix::identity(3);
        assert!(matches!(
            extension_order_check(&op, &bundle, &junk, 1.0),
            Err(ExtensionError::NotAnExtension { .. })
        ));
    }
}
