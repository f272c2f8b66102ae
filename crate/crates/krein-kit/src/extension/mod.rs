//! Finite-dimensional Krein-von Neumann and Friedrichs extension theory for
//! strictly positive operators given on a proper subspace.
//!
//! The deficiency of the restriction is modeled by a non-dense domain: the
//! operator is known on a `d`-dimensional subspace of an `n`-dimensional
//! space with `d < n`. The Friedrichs extension is then a self-adjoint
//! relation and is handled through its inverse and its resolvents, both
//! genuine matrices; the Krein extension is a genuine matrix throughout.
//! Every identity of the theory holds exactly at this finite level, which is
//! what makes the verification suite sharp.

mod bundle;
mod operator;

pub use bundle::{
    adjoint_kernel, decomposition_residual, domain_complement, domain_decompose,
    eigenvalue_ordering, extension_order_check, extension_order_check_with,
    extension_property_residual, friedrichs_inverse, friedrichs_resolvent, krein_extension,
    krein_formula_residual, random_extensions, reduced_krein_inverse, resolvent_sandwich_margin,
    DomainDecomposition, EigenvalueOrdering, ExtensionBundle,
};
pub use operator::RestrictedOperator;

use thiserror::Error;

use crate::linalg::LinalgError;

#[derive(Debug, Error)]
pub enum ExtensionError {
    #[error("compressed operator is not strictly positive (min eigenvalue {epsilon:.6e} <= floor {floor:.6e})")]
    NotStrictlyPositive { epsilon: f64, floor: f64 },
    #[error("domain spanning set is rank deficient")]
    RankDeficientDomain,
    #[error("ambient matrix is not symmetric (asymmetry {asymmetry:.3e}, scale {scale:.3e})")]
    AsymmetricAmbient { asymmetry: f64, scale: f64 },
    #[error("domain basis is not orthonormal (defect {defect:.3e})")]
    DomainBasisNotOrthonormal { defect: f64 },
    #[error("compression EᵀB is not symmetric (asymmetry {asymmetry:.3e})")]
    CompressionNotSymmetric { asymmetry: f64 },
    #[error("basis inversion condition {condition:.3e} exceeds cap {cap:.3e}")]
    IllConditionedDecomposition { condition: f64, cap: f64 },
    #[error("resolvent shift must be positive (got {a})")]
    NonpositiveShift { a: f64 },
    #[error("candidate does not extend the operator (residual {residual:.3e})")]
    NotAnExtension { residual: f64 },
    #[error("requested {j_max} eigenvalues, but only {d} exist")]
    JOutOfRange { j_max: usize, d: usize },
    #[error("shape error: {context}")]
    Shape { context: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
