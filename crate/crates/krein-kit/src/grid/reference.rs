//! Continuum reference eigenvalues for the two concrete problems.

use serde::Serialize;

use super::refine::{richardson_extrapolate, RefinementLevel, RefinementStudy};
use super::stencil::rectangle_pencil_sparse;
use super::GridError;
use crate::linalg::smallest_pencil_eigs;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceProblem {
    /// Buckling of a clamped column on the unit interval.
    ClampedColumn1d,
    /// Buckling of a clamped plate on the unit square.
    ClampedPlateSquare,
}

/// Reference eigenvalues together with a record of how they were produced.
#[derive(Debug, Clone, Serialize)]
pub struct ReferenceSpectrum {
    pub problem: ReferenceProblem,
    pub values: Vec<f64>,
    pub detail: ReferenceDetail,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ReferenceDetail {
    /// Bracketed roots `k_j` of the clamped-column characteristic equation;
    /// the eigenvalues are `k_j²`.
    CharacteristicRoots { k_values: Vec<f64> },
    /// Self-consistent extrapolation of the solver's own refinement sequence;
    /// no literature constant enters.
    Extrapolated(RefinementStudy),
}

/// Characteristic function of the clamped-column buckling problem:
/// `2 (1 - cos k) - k sin k`. Its positive roots `k` give eigenvalues `k²`;
/// the smallest root is exactly `2π`.
pub fn clamped_column_characteristic(k: f64) -> f64 {
    2.0 * (1.0 - k.cos()) - k * k.sin()
}

fn column_roots(count: usize) -> Result<Vec<f64>, GridError> {
    // scan for sign changes, then bisect; roots are simple and well separated
    let mut roots = Vec::with_capacity(count);
    let step = 0.05;
    let mut k = 0.75; // skip the k -> 0 degeneracy, where the function is positive
    let upper = 2.0 * std::f64::consts::PI * (count as f64 + 2.0);
    let mut f_prev = clamped_column_characteristic(k);
    while roots.len() < count && k < upper {
        let k_next = k + step;
        let f_next = clamped_column_characteristic(k_next);
        if f_prev == 0.0 {
            roots.push(k);
        } else if f_prev * f_next < 0.0 {
            let (mut lo, mut hi) = (k, k_next);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if clamped_column_characteristic(lo) * clamped_column_characteristic(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        k = k_next;
        f_prev = f_next;
    }
    if roots.len() < count {
        return Err(GridError::RootFindingFailure {
            context: format!("found {} of {count} characteristic roots", roots.len()),
        });
    }
    Ok(roots)
}

/// Grid levels used for the self-consistent plate reference.
pub const PLATE_REFERENCE_LEVELS: [usize; 3] = [15, 31, 63];

fn plate_study() -> Result<RefinementStudy, GridError> {
    let mut levels = Vec::new();
    for &n in &PLATE_REFERENCE_LEVELS {
        let (g, m) = rectangle_pencil_sparse(n, n)?;
        let eigs = smallest_pencil_eigs(&g, &m, 1, 0.0)?;
        levels.push(RefinementLevel {
            nodes: n,
            h: 1.0 / (n as f64 + 1.0),
            lambda1: eigs.values[0],
        });
    }
    richardson_extrapolate(&levels)
}

/// Reference eigenvalues for a recognized problem.
///
/// The clamped column has a closed-form characteristic equation, so any number
/// of eigenvalues is available. The unit-square plate has no closed form; its
/// single reference value is the Richardson-extrapolated limit of this
/// crate's own refinement sequence, with the inputs recorded in the detail.
pub fn continuum_reference(
    problem: ReferenceProblem,
    count: usize,
) -> Result<ReferenceSpectrum, GridError> {
    match problem {
        ReferenceProblem::ClampedColumn1d => {
            let roots = column_roots(count.max(1))?;
            let values = roots.iter().map(|k| k * k).collect();
            Ok(ReferenceSpectrum {
                problem,
                values,
                detail: ReferenceDetail::CharacteristicRoots { k_values: roots },
            })
        }
        ReferenceProblem::ClampedPlateSquare => {
            let study = plate_study()?;
            Ok(ReferenceSpectrum {
                problem,
                values: vec![study.extrapolated],
                detail: ReferenceDetail::Extrapolated(study),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_root_is_two_pi() {
        let spec = continuum_reference(ReferenceProblem::ClampedColumn1d, 2).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!((spec.values[0] - two_pi * two_pi).abs() < 1e-8);
        let ReferenceDetail::CharacteristicRoots { k_values } = &spec.detail else {
            panic!("wrong detail kind");
        };
        assert!((k_values[0] - two_pi).abs() < 1e-9);
        // second root, bracketed between 2π and 4π
        assert!((k_values[1] - 8.986818915).abs() < 1e-6);
        assert!((spec.values[1] - 80.762914).abs() < 1e-4);
    }

    #[test]
    fn characteristic_function_vanishes_at_two_pi() {
        let two_pi = 2.0 * std::f64::consts::PI;
        assert!(clamped_column_characteristic(two_pi).abs() < 1e-12);
        // and is positive just above zero
        assert!(clamped_column_characteristic(0.3) > 0.0);
    }
}
