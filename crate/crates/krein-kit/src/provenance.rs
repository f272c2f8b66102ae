//! Where an instance came from, carried through reports for reproducibility.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Seeded random instance: ambient spectrum log-uniform in
    /// `[eps, 100 eps]`, random domain subspace.
    Random { n: usize, d: usize, eps: f64, seed: u64 },
    /// 1D clamped-column discretization with `nodes` interior grid points.
    Interval { nodes: usize },
    /// 2D clamped-plate discretization on an `nx` by `ny` interior grid.
    Rectangle { nx: usize, ny: usize, lx: f64, ly: f64 },
    /// Built directly from an ambient matrix and a domain spanning set.
    Ambient { label: String },
    /// Loaded from an instance file.
    File { path: String },
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Random { n, d, eps, seed } => {
                write!(f, "random(n={n}, d={d}, eps={eps}, seed={seed})")
            }
            Provenance::Interval { nodes } => write!(f, "interval(N={nodes})"),
            Provenance::Rectangle { nx, ny, lx, ly } => {
                write!(f, "rectangle({nx}x{ny}, {lx}x{ly})")
            }
            Provenance::Ambient { label } => write!(f, "ambient({label})"),
            Provenance::File { path } => write!(f, "file({path})"),
        }
    }
}
