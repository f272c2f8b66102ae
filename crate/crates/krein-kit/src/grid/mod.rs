//! Concrete instances: clamped-column and clamped-plate discretizations,
//! seeded random instances, and continuum reference values.
//!
//! The discrete model of a clamped boundary keeps only grid functions
//! supported at least two layers away from the boundary: the second-difference
//! operator applied to such functions never touches boundary data, so the
//! restriction has genuine deficiency and the adjoint kernel consists of the
//! discrete harmonics.

mod reference;
mod refine;
mod stencil;

pub use reference::{
    clamped_column_characteristic, continuum_reference, ReferenceProblem, ReferenceSpectrum,
};
pub use refine::{richardson_extrapolate, RefinementLevel, RefinementStudy};
pub use stencil::{
    clamped_plate_cross_pencil, interval_minimal_laplacian, interval_pencil_sparse,
    rectangle_minimal_laplacian, rectangle_pencil_sparse,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::extension::{ExtensionError, RestrictedOperator};
use crate::linalg::{qr_square, DenseMatrix, LinalgError};
use crate::provenance::Provenance;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid too small: need at least 5 interior nodes per axis, got {got}")]
    GridTooSmall { got: usize },
    #[error("invalid shape: {context}")]
    InvalidShape { context: String },
    #[error("unknown reference problem")]
    UnknownProblem,
    #[error("root finding failed: {context}")]
    RootFindingFailure { context: String },
    #[error("need at least {need} refinement levels, got {got}")]
    NotEnoughLevels { need: usize, got: usize },
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Geometry of a finite-difference grid over the unit interval or a
/// rectangle. Interior nodes only; spacing is `h = length / (count + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dimension")]
pub enum GridSpec {
    #[serde(rename = "1")]
    Interval { nodes: usize },
    #[serde(rename = "2")]
    Rectangle { nx: usize, ny: usize, lx: f64, ly: f64 },
}

impl GridSpec {
    pub fn interval(nodes: usize) -> Result<Self, GridError> {
        let spec = GridSpec::Interval { nodes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn unit_square(nodes_per_axis: usize) -> Result<Self, GridError> {
        let spec = GridSpec::Rectangle { nx: nodes_per_axis, ny: nodes_per_axis, lx: 1.0, ly: 1.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn rectangle(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        let spec = GridSpec::Rectangle { nx, ny, lx, ly };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        match *self {
            GridSpec::Interval { nodes } => {
                if nodes < 5 {
                    return Err(GridError::GridTooSmall { got: nodes });
                }
            }
            GridSpec::Rectangle { nx, ny, lx, ly } => {
                if nx < 5 || ny < 5 {
                    return Err(GridError::GridTooSmall { got: nx.min(ny) });
                }
                if !(lx > 0.0) || !(ly > 0.0) {
                    return Err(GridError::InvalidShape {
                        context: format!("side lengths must be positive, got {lx} x {ly}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            GridSpec::Interval { .. } => 1,
            GridSpec::Rectangle { .. } => 2,
        }
    }

    /// Grid spacing per axis.
    pub fn spacing(&self) -> (f64, Option<f64>) {
        match *self {
            GridSpec::Interval { nodes } => (1.0 / (nodes as f64 + 1.0), None),
            GridSpec::Rectangle { nx, ny, lx, ly } => {
                (lx / (nx as f64 + 1.0), Some(ly / (ny as f64 + 1.0)))
            }
        }
    }

    /// Total number of interior nodes (the ambient dimension).
    pub fn ambient_dim(&self) -> usize {
        match *self {
            GridSpec::Interval { nodes } => nodes,
            GridSpec::Rectangle { nx, ny, .. } => nx * ny,
        }
    }

    /// Number of deep-interior nodes (the domain dimension).
    pub fn domain_dim(&self) -> usize {
        match *self {
            GridSpec::Interval { nodes } => nodes - 2,
            GridSpec::Rectangle { nx, ny, .. } => (nx - 2) * (ny - 2),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            GridSpec::Interval { nodes } => format!("unit interval, N={nodes}"),
            GridSpec::Rectangle { nx, ny, lx, ly } => {
                if (lx - 1.0).abs() < 1e-15 && (ly - 1.0).abs() < 1e-15 {
                    format!("unit square, {nx}x{ny}")
                } else {
                    format!("rectangle {lx}x{ly}, {nx}x{ny}")
                }
            }
        }
    }

    pub fn provenance(&self) -> Provenance {
        match *self {
            GridSpec::Interval { nodes } => Provenance::Interval { nodes },
            GridSpec::Rectangle { nx, ny, lx, ly } => Provenance::Rectangle { nx, ny, lx, ly },
        }
    }

    /// Build the restricted operator for this grid (dense representation).
    pub fn build(&self) -> Result<RestrictedOperator, GridError> {
        match *self {
            GridSpec::Interval { nodes } => interval_minimal_laplacian(nodes),
            GridSpec::Rectangle { .. } => rectangle_minimal_laplacian_spec(self),
        }
    }

    /// The full discrete operator on all interior nodes, as a dense matrix.
    /// This is itself a positive definite extension of the restricted
    /// operator, handy for the ordering checks.
    pub fn ambient_matrix(&self) -> Result<DenseMatrix, GridError> {
        stencil::ambient_dense(self)
    }
}

fn rectangle_minimal_laplacian_spec(spec: &GridSpec) -> Result<RestrictedOperator, GridError> {
    match *spec {
        GridSpec::Rectangle { nx, ny, lx, ly } => {
            stencil::rectangle_minimal_laplacian_sized(nx, ny, lx, ly)
        }
        _ => unreachable!(),
    }
}

/// Deterministic random instance: ambient `A = Vᵀ Λ V` with `V` orthogonal
/// from the QR of a Gaussian matrix and `Λ` log-uniform in `[eps, 100 eps]`,
/// restricted to a random `d`-dimensional subspace. The instance's ε is the
/// smallest eigenvalue of the compression and is at least `eps`.
pub fn random_instance(
    n: usize,
    d: usize,
    eps: f64,
    seed: u64,
) -> Result<RestrictedOperator, GridError> {
    random_instance_with_ambient(n, d, eps, seed).map(|(_, op)| op)
}

/// Same as [`random_instance`] but also hands back the ambient matrix, which
/// is itself a valid extension and useful in ordering tests.
pub fn random_instance_with_ambient(
    n: usize,
    d: usize,
    eps: f64,
    seed: u64,
) -> Result<(DenseMatrix, RestrictedOperator), GridError> {
    if d == 0 || d >= n {
        return Err(GridError::InvalidShape {
            context: format!("need 1 <= d < n, got n={n}, d={d}"),
        });
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(GridError::InvalidShape { context: format!("eps must be positive, got {eps}") });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gauss = DenseMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let (v, _) = qr_square(&gauss);
    let log_range = Uniform::new(eps.ln(), (100.0 * eps).ln());
    let spectrum: Vec<f64> = (0..n).map(|_| log_range.sample(&mut rng).exp()).collect();
    let lambda = DenseMatrix::diagonal(&spectrum);
    let ambient = v.matmul(&lambda).matmul(&v.transpose()).symmetrize();

    let span = DenseMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
    let provenance = Provenance::Random { n, d, eps, seed };
    let op = RestrictedOperator::from_ambient(&ambient, &span, 0.0, provenance)?;
    Ok((ambient, op))
}
