//! The abstract buckling problem attached to a restricted operator: the two
//! sesquilinear forms, the form-space operator `T`, the generalized pencil
//! `G c = λ M c`, and the unitary equivalences tying the pencil to the
//! nonzero spectrum of the Krein extension.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::config::Tolerances;
use crate::extension::{ExtensionBundle, ExtensionError, RestrictedOperator};
use crate::linalg::{
    dot, gen_sym_eig, linear_solve_with, norm2, spd_inverse_sqrt, sym_eig, DenseMatrix,
    LinalgError, PencilEigs,
};
use crate::provenance::Provenance;

#[derive(Debug, Error)]
pub enum BucklingError {
    #[error("pair is not an eigenpair of the pencil (residual {residual:.3e} > {bound:.3e})")]
    NotAnEigenpair { residual: f64, bound: f64 },
    #[error("eigenvalue {lambda:.3e} is treated as zero; the correspondence requires λ ≠ 0")]
    ZeroEigenvalue { lambda: f64 },
    #[error("shape error: {context}")]
    Shape { context: String },
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The two Gram matrices of the buckling forms in domain coordinates:
/// `g[i][j] = (S e_i, S e_j)` is the form-space inner product and
/// `m[i][j] = (e_i, S e_j)` the pencil's right-hand form. Both are symmetric
/// positive definite, with `ε·m ⪯ g` mirroring the operator norm bound on the
/// form space.
#[derive(Debug, Clone)]
pub struct GramPair {
    pub g: DenseMatrix,
    pub m: DenseMatrix,
}

impl GramPair {
    /// Worst violation of the structural facts, as a nonnegative number:
    /// definiteness of both forms, `min eig(M) ≥ ε`, and
    /// `min eig(G - εM) ≥ -tol·‖G‖`.
    pub fn validation_defect(&self, epsilon: f64) -> Result<f64, BucklingError> {
        let g_min = crate::linalg::min_eigenvalue(&self.g)?;
        let m_min = crate::linalg::min_eigenvalue(&self.m)?;
        let gap = &self.g - &self.m.scale(epsilon);
        let gap_min = crate::linalg::min_eigenvalue(&gap.symmetrize())?;
        let scale = self.g.norm_fro().max(f64::MIN_POSITIVE);
        let mut defect = 0.0f64;
        defect = defect.max(-g_min).max(-m_min);
        defect = defect.max(epsilon - m_min - 1e-12 * epsilon.abs());
        defect = defect.max(-gap_min / scale);
        Ok(defect.max(0.0))
    }
}

/// Assemble the Gram pair `G = BᵀB`, `M = EᵀB` of an operator.
pub fn gram_pair(op: &RestrictedOperator) -> GramPair {
    let b = op.image();
    GramPair {
        g: b.transpose().matmul(b).symmetrize(),
        m: op.compression(),
    }
}

/// The buckling operator `T = G⁻¹M` on the form space: self-adjoint and
/// positive in the `G` inner product, with `G`-operator norm at most `1/ε`.
pub fn buckling_operator(op: &RestrictedOperator) -> Result<DenseMatrix, BucklingError> {
    let gram = gram_pair(op);
    buckling_operator_from(&gram)
}

pub fn buckling_operator_from(gram: &GramPair) -> Result<DenseMatrix, BucklingError> {
    Ok(linear_solve_with(&gram.g, &gram.m, &Tolerances::default())?)
}

/// `G`-operator norm of `T`, i.e. the largest eigenvalue of
/// `G^{-1/2} M G^{-1/2}`, computed through the reciprocal pencil.
pub fn buckling_operator_norm(gram: &GramPair) -> Result<f64, BucklingError> {
    let pencil = gen_sym_eig(&gram.m, &gram.g)?;
    Ok(*pencil.values.last().expect("nonempty pencil"))
}

/// Ascending solutions of the buckling pencil `G c = λ M c`. All eigenvalues
/// are at least ε, and they are exactly the reciprocals of the eigenvalues of
/// `T`.
pub fn buckling_pencil_eigs(op: &RestrictedOperator) -> Result<PencilEigs, BucklingError> {
    let gram = gram_pair(op);
    Ok(gen_sym_eig(&gram.g, &gram.m)?)
}

/// The matrix of the map that sends form-space coordinates to range
/// coordinates, `Ŝ = Qᵀ B`. It is invertible and carries the form inner
/// product to the ambient one: `ŜᵀŜ = G`.
pub fn range_isometry(op: &RestrictedOperator, bundle: &ExtensionBundle) -> DenseMatrix {
    bundle.range().transpose().matmul(op.image())
}

/// Outcome of the unitary-equivalence verification.
///
/// `similarity_residual` compares the reduced Krein inverse with `Ŝ T Ŝ⁻¹`;
/// `polar_residual` compares it with `Û (G^{-1/2} M G^{-1/2}) Ûᵀ` where
/// `Û = Ŝ G^{-1/2}` is the polar unitary factor in range coordinates. Both
/// are relative to `‖F‖`.
#[derive(Debug, Clone)]
pub struct BucklingReport {
    pub lambdas: Vec<f64>,
    pub vectors: DenseMatrix,
    pub t_matrix: DenseMatrix,
    pub range_isometry: DenseMatrix,
    pub similarity_residual: f64,
    pub polar_residual: f64,
    pub unitary_defect: f64,
    pub t_norm: f64,
    pub epsilon_inv: f64,
    pub provenance: Provenance,
}

impl BucklingReport {
    pub fn epsilon_bound_satisfied(&self, slack: f64) -> bool {
        self.t_norm <= self.epsilon_inv + slack
    }
}

// Wire format pinned by the instance-file consumers; matrices stay internal.
impl Serialize for BucklingReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct TNormBound {
            value: f64,
            epsilon_inv: f64,
        }
        let mut s = serializer.serialize_struct("BucklingReport", 5)?;
        s.serialize_field("lambdas", &self.lambdas)?;
        s.serialize_field(
            "t_norm_bound",
            &TNormBound { value: self.t_norm, epsilon_inv: self.epsilon_inv },
        )?;
        s.serialize_field("residual_eq_3_20", &self.similarity_residual)?;
        s.serialize_field("residual_eq_3_20a", &self.polar_residual)?;
        s.serialize_field("instance_provenance", &self.provenance)?;
        s.end()
    }
}

/// Verify both unitary-equivalence identities for an instance and collect the
/// residuals. A failure of either identity beyond tolerance falsifies the
/// construction, not the instance.
pub fn verify_unitary_equivalence(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
) -> Result<BucklingReport, BucklingError> {
    let gram = gram_pair(op);
    let tol = Tolerances::default();

    let reduced = crate::extension::reduced_krein_inverse(op, bundle)?;
    let f_norm = bundle.friedrichs_inverse().norm_fro().max(f64::MIN_POSITIVE);

    let t = buckling_operator_from(&gram)?;
    let s_hat = range_isometry(op, bundle);
    // Ŝ T Ŝ⁻¹, with T Ŝ⁻¹ obtained from Ŝᵀ Xᵀ = Tᵀ
    let x_t = linear_solve_with(&s_hat.transpose(), &t.transpose(), &tol)?;
    let similarity = s_hat.matmul(&x_t.transpose());
    let similarity_residual = (&reduced - &similarity).norm_fro() / f_norm;

    let g_inv_sqrt = spd_inverse_sqrt(&gram.g)?;
    let u = s_hat.matmul(&g_inv_sqrt);
    let unitary_defect =
        (&u.transpose().matmul(&u) - &DenseMatrix::identity(op.domain_dim())).norm_fro();
    let middle = g_inv_sqrt.matmul(&gram.m).matmul(&g_inv_sqrt).symmetrize();
    let polar = u.matmul(&middle).matmul(&u.transpose());
    let polar_residual = (&reduced - &polar).norm_fro() / f_norm;

    let pencil = gen_sym_eig(&gram.g, &gram.m)?;
    let t_norm = buckling_operator_norm(&gram)?;

    Ok(BucklingReport {
        lambdas: pencil.values,
        vectors: pencil.vectors,
        t_matrix: t,
        range_isometry: s_hat,
        similarity_residual,
        polar_residual,
        unitary_defect,
        t_norm,
        epsilon_inv: 1.0 / op.epsilon(),
        provenance: op.provenance().clone(),
    })
}

/// Map a pencil eigenpair `(λ, c)` to the Krein eigenvector `v = λ⁻¹ B c`
/// with `SK v = λ v`. The pair must actually solve the pencil.
pub fn pencil_to_krein(
    op: &RestrictedOperator,
    gram: &GramPair,
    lambda: f64,
    c: &[f64],
) -> Result<Vec<f64>, BucklingError> {
    if c.len() != op.domain_dim() {
        return Err(BucklingError::Shape {
            context: format!("pencil_to_krein: coordinate length {} != d={}", c.len(), op.domain_dim()),
        });
    }
    let tol = Tolerances::default();
    if lambda <= tol.zero_eigenvalue {
        return Err(BucklingError::ZeroEigenvalue { lambda });
    }
    let gc = gram.g.matvec(c);
    let mc = gram.m.matvec(c);
    let resid: f64 = gc
        .iter()
        .zip(&mc)
        .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
        .sum::<f64>()
        .sqrt();
    let bound = tol.correspondence
        * (gram.g.norm_fro() + lambda * gram.m.norm_fro())
        * norm2(c).max(f64::MIN_POSITIVE);
    if resid > bound {
        return Err(BucklingError::NotAnEigenpair { residual: resid, bound });
    }
    let bc = op.image().matvec(c);
    Ok(bc.into_iter().map(|x| x / lambda).collect())
}

/// Map a nonzero-eigenvalue Krein eigenvector back to the pencil: `u = F SK v`
/// lies in the domain, and its coordinates `c = Eᵀu` solve `G c = λ M c` with
/// λ the Rayleigh quotient of `v`.
pub fn krein_to_pencil(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
    gram: &GramPair,
    v: &[f64],
) -> Result<(f64, Vec<f64>), BucklingError> {
    if v.len() != op.ambient_dim() {
        return Err(BucklingError::Shape {
            context: format!("krein_to_pencil: vector length {} != n={}", v.len(), op.ambient_dim()),
        });
    }
    let tol = Tolerances::default();
    let sk_v = bundle.krein().matvec(v);
    let v_norm_sq = dot(v, v);
    if v_norm_sq == 0.0 {
        return Err(BucklingError::Shape { context: "krein_to_pencil: zero vector".into() });
    }
    let lambda = dot(v, &sk_v) / v_norm_sq;
    if lambda <= tol.zero_eigenvalue {
        return Err(BucklingError::ZeroEigenvalue { lambda });
    }
    let resid: f64 = sk_v
        .iter()
        .zip(v)
        .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
        .sum::<f64>()
        .sqrt();
    let bound = tol.correspondence * lambda * v_norm_sq.sqrt();
    if resid > bound {
        return Err(BucklingError::NotAnEigenpair { residual: resid, bound });
    }
    let u = bundle.friedrichs_inverse().matvec(&sk_v);
    let c = op.domain_basis().tr_matvec(&u);
    // sanity: c must solve the pencil at lambda
    let gc = gram.g.matvec(&c);
    let mc = gram.m.matvec(&c);
    let pencil_resid: f64 = gc
        .iter()
        .zip(&mc)
        .map(|(a, b)| (a - lambda * b) * (a - lambda * b))
        .sum::<f64>()
        .sqrt();
    let pencil_bound = tol.correspondence
        * (gram.g.norm_fro() + lambda * gram.m.norm_fro())
        * norm2(&c).max(f64::MIN_POSITIVE);
    if pencil_resid > pencil_bound {
        return Err(BucklingError::NotAnEigenpair { residual: pencil_resid, bound: pencil_bound });
    }
    Ok((lambda, c))
}

/// Largest relative gap between the sorted pencil eigenvalues and the sorted
/// nonzero Krein eigenvalues; the spectral identity says this is zero.
pub fn spectral_identity_residual(
    op: &RestrictedOperator,
    bundle: &ExtensionBundle,
) -> Result<f64, BucklingError> {
    let pencil = buckling_pencil_eigs(op)?;
    let sk = sym_eig(bundle.krein())?;
    let krein_nonzero = &sk.values[op.deficiency()..];
    let mut worst = 0.0f64;
    for (a, b) in pencil.values.iter().zip(krein_nonzero) {
        worst = worst.max((a - b).abs() / b.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
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

    fn diag123() -> RestrictedOperator {
        let a = DenseMatrix::diagonal(&[1.0, 2.0, 3.0]);
        let span = DenseMatrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        RestrictedOperator::from_ambient(
            &a,
            &span,
            0.0,
            Provenance::Ambient { label: "diag123".into() },
        )
        .unwrap()
    }

    #[test]
    fn gram_pair_identity_and_diag123() {
        let op = identity_restriction();
        let gram = gram_pair(&op);
        assert!((gram.g[(0, 0)] - 1.0).abs() < 1e-14);
        assert!((gram.m[(0, 0)] - 1.0).abs() < 1e-14);
        assert!(gram.validation_defect(op.epsilon()).unwrap() < 1e-12);

        let op = diag123();
        let gram = gram_pair(&op);
        assert!((gram.g[(0, 0)] - 14.0 / 3.0).abs() < 1e-13);
        assert!((gram.m[(0, 0)] - 2.0).abs() < 1e-13);
        assert!(gram.validation_defect(op.epsilon()).unwrap() < 1e-12);
    }

    #[test]
    fn buckling_operator_values_and_bound() {
        let op = identity_restriction();
        let t = buckling_operator(&op).unwrap();
        assert!((t[(0, 0)] - 1.0).abs() < 1e-14);
        let gram = gram_pair(&op);
        let norm = buckling_operator_norm(&gram).unwrap();
        assert!((norm - 1.0).abs() < 1e-12); // bound tight: 1/ε = 1

        let op = diag123();
        let t = buckling_operator(&op).unwrap();
        assert!((t[(0, 0)] - 3.0 / 7.0).abs() < 1e-13);
        let norm = buckling_operator_norm(&gram_pair(&op)).unwrap();
        assert!(norm <= 1.0 / op.epsilon() + 1e-9);
    }

    #[test]
    fn pencil_values() {
        let op = identity_restriction();
        let p = buckling_pencil_eigs(&op).unwrap();
        assert!((p.values[0] - 1.0).abs() < 1e-13);

        let op = diag123();
        let p = buckling_pencil_eigs(&op).unwrap();
        assert!((p.values[0] - 7.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unitary_equivalence_scalar_cases() {
        for op in [identity_restriction(), diag123()] {
            let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
            let report = verify_unitary_equivalence(&op, &bundle).unwrap();
            assert!(report.similarity_residual < 1e-13, "{}", report.similarity_residual);
            assert!(report.polar_residual < 1e-13);
            assert!(report.unitary_defect < 1e-13);
            assert!(report.epsilon_bound_satisfied(1e-9));
        }
        let op = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let report = verify_unitary_equivalence(&op, &bundle).unwrap();
        let s = report.range_isometry[(0, 0)].abs();
        assert!((s - (14.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn correspondence_round_trip_diag123() {
        let op = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let gram = gram_pair(&op);
        let p = buckling_pencil_eigs(&op).unwrap();
        let lambda = p.values[0];
        let c = p.vectors.column(0);
        let v = pencil_to_krein(&op, &gram, lambda, &c).unwrap();
        // v is proportional to (1,2,3)
        assert!((v[1] / v[0] - 2.0).abs() < 1e-10);
        assert!((v[2] / v[0] - 3.0).abs() < 1e-10);
        let (lam_back, c_back) = krein_to_pencil(&op, &bundle, &gram, &v).unwrap();
        assert!((lam_back - lambda).abs() < 1e-12 * lambda);
        let ratio = c_back[0] / c[0];
        assert!((ratio - 1.0).abs() < 1e-10);
    }

    #[test]
    fn correspondence_rejects_bad_input() {
        let op = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let gram = gram_pair(&op);
        assert!(matches!(
            pencil_to_krein(&op, &gram, 5.0, &[1.0]),
            Err(BucklingError::NotAnEigenpair { .. })
        ));
        assert!(matches!(
            pencil_to_krein(&op, &gram, 0.0, &[1.0]),
            Err(BucklingError::ZeroEigenvalue { .. })
        ));
        // kernel vector of SK has Rayleigh quotient ~ 0
        let w = [2.0, -1.0, 0.0];
        assert!(matches!(
            krein_to_pencil(&op, &bundle, &gram, &w),
            Err(BucklingError::ZeroEigenvalue { .. })
        ));
    }

    #[test]
    fn report_serializes_to_pinned_shape() {
        let op = diag123();
        let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
        let report = verify_unitary_equivalence(&op, &bundle).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert!(json.get("lambdas").is_some());
        assert!(json.get("t_norm_bound").and_then(|t| t.get("value")).is_some());
        assert!(json.get("t_norm_bound").and_then(|t| t.get("epsilon_inv")).is_some());
        assert!(json.get("residual_eq_3_20").is_some());
        assert!(json.get("residual_eq_3_20a").is_some());
        assert!(json.get("instance_provenance").is_some());
    }
}
