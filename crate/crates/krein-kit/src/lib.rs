//! Krein-von Neumann and Friedrichs extensions of strictly positive symmetric
//! operators given on a subspace of a finite-dimensional inner-product space,
//! together with the abstract buckling problem whose pencil spectrum coincides
//! with the nonzero spectrum of the Krein extension.
//!
//! The crate has four layers:
//!
//! * [`linalg`] — dense/sparse symmetric kernels (eigensolvers, pivoted QR,
//!   band Cholesky, shift-invert Lanczos);
//! * [`extension`] — the restricted operator model and the two extremal
//!   extensions with their identities;
//! * [`buckling`] — the form-space operator, the generalized pencil, and the
//!   unitary equivalences;
//! * [`grid`] — clamped-column/clamped-plate discretizations, random
//!   instances, and continuum reference values.
//!
//! The narrative guide lives in `book/`; its code snippets compile and run as
//! doctests of this crate, so the guide cannot drift from the API.
//!
//! ```
//! use krein_kit::{DenseMatrix, ExtensionBundle, RestrictedOperator, Tolerances, Provenance};
//!
//! let ambient = DenseMatrix::diagonal(&[1.0, 2.0, 3.0]);
//! let span = DenseMatrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
//! let op = RestrictedOperator::from_ambient(
//!     &ambient, &span, 0.0, Provenance::Ambient { label: "demo".into() },
//! ).unwrap();
//! assert!((op.epsilon() - 2.0).abs() < 1e-12);
//!
//! let bundle = ExtensionBundle::new(&op, &Tolerances::default()).unwrap();
//! let eigs = krein_kit::linalg::sym_eig(bundle.krein()).unwrap();
//! assert!((eigs.values[2] - 7.0 / 3.0).abs() < 1e-12);
//! ```

pub mod buckling;
pub mod config;
pub mod extension;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod provenance;
pub mod runtime;
pub mod verify;

pub use buckling::{BucklingError, BucklingReport, GramPair};
pub use config::Tolerances;
pub use extension::{ExtensionBundle, ExtensionError, RestrictedOperator};
pub use grid::{GridError, GridSpec};
pub use io::IoError;
pub use linalg::{DenseMatrix, LinalgError, SparseSymMatrix};
pub use provenance::Provenance;
pub use verify::{run_identity_suite, SuiteOptions, VerificationReport};

// The book's code fences run as doctests so the guide stays honest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/restricted-operators.md")]
    mod restricted_operators {}
    #[doc = include_str!("../../../book/src/extensions.md")]
    mod extensions {}
    #[doc = include_str!("../../../book/src/buckling.md")]
    mod buckling {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
