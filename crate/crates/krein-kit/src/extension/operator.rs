//! Strictly positive symmetric operators given on a proper subspace.

use serde::{Deserialize, Serialize};

use super::ExtensionError;
use crate::config::Tolerances;
use crate::linalg::{min_eigenvalue, orthonormalize_columns, DenseMatrix, LinalgError};
use crate::provenance::Provenance;

/// A symmetric operator `S` restricted to a `d`-dimensional subspace `D` of an
/// `n`-dimensional real inner-product space, with `S ≥ ε > 0` on `D` and
/// `d < n` (nonzero deficiency: `dim ker(S*) = n - d`).
///
/// The operator is stored through an orthonormal basis `E` of `D` and the
/// image matrix `B` whose j-th column is `S` applied to the j-th column of
/// `E`. The adjoint never appears explicitly: its kernel is `ran(B)ᵀ`'s
/// orthogonal complement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestrictedOperator {
    n: usize,
    d: usize,
    #[serde(rename = "E")]
    domain_basis: DenseMatrix,
    #[serde(rename = "B")]
    image: DenseMatrix,
    epsilon: f64,
    provenance: Provenance,
}

impl RestrictedOperator {
    /// Restrict an ambient symmetric matrix `a` to the span of `domain_span`
    /// (any full-column-rank spanning set). The positivity bound ε is set to
    /// the smallest eigenvalue of the compressed matrix `EᵀAE`; construction
    /// fails if that eigenvalue does not exceed `epsilon_floor`.
    pub fn from_ambient(
        a: &DenseMatrix,
        domain_span: &DenseMatrix,
        epsilon_floor: f64,
        provenance: Provenance,
    ) -> Result<Self, ExtensionError> {
        if !a.is_square() || a.rows() != domain_span.rows() {
            return Err(ExtensionError::Shape {
                context: format!(
                    "from_ambient: ambient {}x{}, span {}x{}",
                    a.rows(),
                    a.cols(),
                    domain_span.rows(),
                    domain_span.cols()
                ),
            });
        }
        let scale = a.norm_max();
        if a.max_asymmetry() > 1e-12 * scale {
            return Err(ExtensionError::AsymmetricAmbient {
                asymmetry: a.max_asymmetry(),
                scale,
            });
        }
        let n = a.rows();
        let d = domain_span.cols();
        if d == 0 || d >= n {
            return Err(ExtensionError::Shape {
                context: format!("from_ambient: need 1 <= d < n, got d={d}, n={n}"),
            });
        }
        let e = orthonormalize_columns(domain_span).map_err(|err| match err {
            LinalgError::SingularToTolerance { .. } => ExtensionError::RankDeficientDomain,
            other => ExtensionError::Linalg(other),
        })?;
        let b = a.matmul(&e);
        let m = e.transpose().matmul(&b).symmetrize();
        let epsilon = min_eigenvalue(&m)?;
        if epsilon <= epsilon_floor {
            return Err(ExtensionError::NotStrictlyPositive { epsilon, floor: epsilon_floor });
        }
        let op = Self { n, d, domain_basis: e, image: b, epsilon, provenance };
        op.validate(&Tolerances::default())?;
        Ok(op)
    }

    /// Assemble from already-validated parts (instance files, discretizers).
    pub fn from_parts(
        domain_basis: DenseMatrix,
        image: DenseMatrix,
        epsilon: f64,
        provenance: Provenance,
    ) -> Result<Self, ExtensionError> {
        let (n, d) = (domain_basis.rows(), domain_basis.cols());
        if image.rows() != n || image.cols() != d {
            return Err(ExtensionError::Shape {
                context: format!(
                    "from_parts: E is {}x{}, B is {}x{}",
                    n,
                    d,
                    image.rows(),
                    image.cols()
                ),
            });
        }
        let op = Self { n, d, domain_basis, image, epsilon, provenance };
        op.validate(&Tolerances::default())?;
        Ok(op)
    }

    /// Check every structural invariant: orthonormal domain basis, symmetric
    /// and strictly positive compression, full-rank image, nonzero deficiency.
    pub fn validate(&self, tol: &Tolerances) -> Result<(), ExtensionError> {
        if self.d == 0 || self.d >= self.n {
            return Err(ExtensionError::Shape {
                context: format!("need 1 <= d < n, got d={}, n={}", self.d, self.n),
            });
        }
        if !self.domain_basis.all_finite() || !self.image.all_finite() {
            return Err(ExtensionError::Linalg(LinalgError::NonFinite {
                context: "RestrictedOperator".into(),
            }));
        }
        let e = &self.domain_basis;
        let ete = e.transpose().matmul(e);
        let defect = (&ete - &DenseMatrix::identity(self.d)).norm_max();
        if defect > tol.orthonormality {
            return Err(ExtensionError::DomainBasisNotOrthonormal { defect });
        }
        let m = e.transpose().matmul(&self.image);
        let asym = m.max_asymmetry();
        if asym > tol.symmetry * self.image.norm_max().max(f64::MIN_POSITIVE) {
            return Err(ExtensionError::CompressionNotSymmetric { asymmetry: asym });
        }
        let min_eig = min_eigenvalue(&m.symmetrize())?;
        if min_eig < self.epsilon - 1e-12 * self.epsilon.abs().max(1.0) {
            return Err(ExtensionError::NotStrictlyPositive {
                epsilon: min_eig,
                floor: self.epsilon,
            });
        }
        if !(self.epsilon > 0.0) {
            return Err(ExtensionError::NotStrictlyPositive {
                epsilon: self.epsilon,
                floor: 0.0,
            });
        }
        // rank(B) = d follows from min_eig > 0: ‖Bc‖ ≥ cᵀMc / ‖c‖ ≥ ε ‖c‖.
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn domain_dim(&self) -> usize {
        self.d
    }

    /// `dim ker(S*) = n - d`.
    pub fn deficiency(&self) -> usize {
        self.n - self.d
    }

    /// Orthonormal basis `E` of the domain subspace, `n x d`.
    pub fn domain_basis(&self) -> &DenseMatrix {
        &self.domain_basis
    }

    /// Image matrix `B = S E`, `n x d`.
    pub fn image(&self) -> &DenseMatrix {
        &self.image
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Compression `M = EᵀB` (symmetrized), the matrix of `S` in domain
    /// coordinates.
    pub fn compression(&self) -> DenseMatrix {
        self.domain_basis.transpose().matmul(&self.image).symmetrize()
    }
}
