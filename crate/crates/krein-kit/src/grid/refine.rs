//! Refinement studies and Richardson extrapolation.

use serde::Serialize;

use super::GridError;

/// One grid level of a refinement study.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementLevel {
    /// Interior nodes per axis.
    pub nodes: usize,
    pub h: f64,
    pub lambda1: f64,
}

/// A refinement sequence with its fitted convergence order and extrapolated
/// limit. The uncertainty is the grid-convergence-index style estimate
/// `1.25 · |λ_finest - λ*|`.
#[derive(Debug, Clone, Serialize)]
pub struct RefinementStudy {
    pub levels: Vec<RefinementLevel>,
    pub observed_order: f64,
    pub extrapolated: f64,
    pub uncertainty: f64,
}

/// Fit `λ(h) = λ* + C hᵖ` through the three finest levels and extrapolate.
/// Works for arbitrary (not necessarily halved) spacings by solving for the
/// order with bisection.
pub fn richardson_extrapolate(levels: &[RefinementLevel]) -> Result<RefinementStudy, GridError> {
    if levels.len() < 3 {
        return Err(GridError::NotEnoughLevels { need: 3, got: levels.len() });
    }
    let mut sorted = levels.to_vec();
    sorted.sort_by(|a, b| b.h.total_cmp(&a.h)); // coarse to fine
    let k = sorted.len();
    let (h1, f1) = (sorted[k - 3].h, sorted[k - 3].lambda1);
    let (h2, f2) = (sorted[k - 2].h, sorted[k - 2].lambda1);
    let (h3, f3) = (sorted[k - 1].h, sorted[k - 1].lambda1);
    if !(h1 > h2 && h2 > h3) {
        return Err(GridError::InvalidShape { context: "duplicate spacings in study".into() });
    }
    let denom = f2 - f3;
    if denom == 0.0 {
        // already converged: order is formally infinite, limit is the value
        return Ok(RefinementStudy {
            levels: sorted,
            observed_order: f64::INFINITY,
            extrapolated: f3,
            uncertainty: 0.0,
        });
    }
    let target = (f1 - f2) / denom;
    let ratio = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p)) - target;
    let (mut lo, mut hi) = (0.05f64, 6.0f64);
    if ratio(lo) * ratio(hi) > 0.0 {
        return Err(GridError::RootFindingFailure {
            context: "observed order outside (0.05, 6); sequence is not asymptotic".into(),
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(lo) * ratio(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let c = (f2 - f3) / (h2.powf(p) - h3.powf(p));
    let extrapolated = f3 - c * h3.powf(p);
    let uncertainty = 1.25 * (f3 - extrapolated).abs();
    Ok(RefinementStudy { levels: sorted, observed_order: p, extrapolated, uncertainty })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level(nodes: usize, h: f64, lambda1: f64) -> RefinementLevel {
        RefinementLevel { nodes, h, lambda1 }
    }

    #[test]
    fn recovers_exact_power_law() {
        // λ(h) = 10 + 3 h^1.5
        let mk = |h: f64| 10.0 + 3.0 * h.powf(1.5);
        let levels = vec![
            level(10, 0.1, mk(0.1)),
            level(20, 0.05, mk(0.05)),
            level(40, 0.025, mk(0.025)),
        ];
        let study = richardson_extrapolate(&levels).unwrap();
        assert!((study.observed_order - 1.5).abs() < 1e-6);
        assert!((study.extrapolated - 10.0).abs() < 1e-9);
    }

    #[test]
    fn non_halved_spacings() {
        let mk = |h: f64| 4.0 + 7.0 * h;
        let levels = vec![
            level(50, 1.0 / 51.0, mk(1.0 / 51.0)),
            level(100, 1.0 / 101.0, mk(1.0 / 101.0)),
            level(200, 1.0 / 201.0, mk(1.0 / 201.0)),
            level(400, 1.0 / 401.0, mk(1.0 / 401.0)),
        ];
        let study = richardson_extrapolate(&levels).unwrap();
        assert!((study.observed_order - 1.0).abs() < 1e-6);
        assert!((study.extrapolated - 4.0).abs() < 1e-10);
    }

    #[test]
    fn two_levels_is_an_error() {
        let levels = vec![level(10, 0.1, 1.0), level(20, 0.05, 0.9)];
        assert!(matches!(
            richardson_extrapolate(&levels),
            Err(GridError::NotEnoughLevels { .. })
        ));
    }
}
