//! Central tolerance record shared by every check in the crate.

use serde::{Deserialize, Serialize};

/// All tolerances are relative to a problem-dependent scale (a matrix norm, an
/// eigenvalue, ...) unless a field name says otherwise. One record is threaded
/// through the constructions and the verification suite so that a CLI override
/// reaches every consumer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Orthonormality defect allowed for basis matrices, `max|QᵀQ - I|`.
    pub orthonormality: f64,
    /// Relative asymmetry accepted before an input is rejected.
    pub symmetry: f64,
    /// `‖SK·E - B‖ / ‖B‖`.
    pub extension_property: f64,
    /// Largest principal angle (radians, sine scale) between the numerical
    /// kernel of the Krein extension and the adjoint kernel basis.
    pub kernel_identity: f64,
    /// `‖QᵀFQ - pinv(QᵀSKQ)‖ / ‖F‖`.
    pub krein_formula: f64,
    /// Residuals of the two unitary-equivalence identities, relative to `‖F‖`.
    pub unitary_equivalence: f64,
    /// `‖ÛᵀÛ - I‖` for the polar unitary factor.
    pub unitary_factor: f64,
    /// Relative slack in `μ_F,j ≤ μ_K,j`.
    pub mu_ordering: f64,
    /// Lowest admissible normalized eigenvalue of a resolvent difference.
    pub resolvent_sandwich: f64,
    /// Relative mismatch between sorted pencil and Krein eigenvalues.
    pub spectral_identity: f64,
    /// Absolute slack on the `1/ε` bound of the buckling operator norm.
    pub t_norm_slack: f64,
    /// Eigenpair residual accepted by the correspondence maps.
    pub correspondence: f64,
    /// Principal-angle tolerance when comparing eigenspaces of multiplicity > 1.
    pub principal_angle: f64,
    /// Residual `‖Hx - b‖ / (‖H‖‖x‖)` accepted from the linear solver.
    pub linear_solve: f64,
    /// Eigen-reconstruction residual `‖HV - VΛ‖ / ‖H‖`.
    pub eigen_residual: f64,
    /// `‖R·H·R - I‖ / cond(H)` for the inverse square root.
    pub inv_sqrt: f64,
    /// Agreement demanded between the iterative and dense pencil paths.
    pub iterative_vs_dense: f64,
    /// Condition-number cap on the basis inversions used by the extension
    /// constructions; instances beyond the cap are rejected.
    pub condition_cap: f64,
    /// Below this an eigenvalue is treated as zero by the correspondence maps.
    pub zero_eigenvalue: f64,
    /// Residual `‖Gc - λMc‖ / (‖G‖ + λ‖M‖)` for pencil eigenpairs.
    pub pencil_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            orthonormality: 1e-12,
            symmetry: 1e-12,
            extension_property: 1e-10,
            kernel_identity: 1e-8,
            krein_formula: 1e-9,
            unitary_equivalence: 1e-9,
            unitary_factor: 1e-10,
            mu_ordering: 1e-9,
            resolvent_sandwich: 1e-9,
            spectral_identity: 1e-9,
            t_norm_slack: 1e-9,
            correspondence: 1e-8,
            principal_angle: 1e-7,
            linear_solve: 1e-10,
            eigen_residual: 1e-10,
            inv_sqrt: 1e-10,
            iterative_vs_dense: 1e-8,
            condition_cap: 1e8,
            zero_eigenvalue: 1e-12,
            pencil_residual: 1e-10,
        }
    }
}

impl Tolerances {
    /// Look up a tolerance by its kebab-case name, as used by CLI overrides.
    pub fn set_by_name(&mut self, name: &str, value: f64) -> Result<(), String> {
        let slot = match name {
            "orthonormality" => &mut self.orthonormality,
            "symmetry" => &mut self.symmetry,
            "extension-property" => &mut self.extension_property,
            "kernel-identity" => &mut self.kernel_identity,
            "krein-formula" => &mut self.krein_formula,
            "unitary-equivalence" => &mut self.unitary_equivalence,
            "unitary-factor" => &mut self.unitary_factor,
            "mu-ordering" => &mut self.mu_ordering,
            "resolvent-sandwich" => &mut self.resolvent_sandwich,
            "spectral-identity" => &mut self.spectral_identity,
            "t-norm" => &mut self.t_norm_slack,
            "correspondence" => &mut self.correspondence,
            "principal-angle" => &mut self.principal_angle,
            "linear-solve" => &mut self.linear_solve,
            "eigen-residual" => &mut self.eigen_residual,
            "inv-sqrt" => &mut self.inv_sqrt,
            "iterative-vs-dense" => &mut self.iterative_vs_dense,
            "condition-cap" => &mut self.condition_cap,
            "zero-eigenvalue" => &mut self.zero_eigenvalue,
            "pencil-residual" => &mut self.pencil_residual,
            other => return Err(format!("unknown tolerance `{other}`")),
        };
        if !value.is_finite() || value < 0.0 {
            return Err(format!("tolerance `{name}` must be finite and >= 0"));
        }
        *slot = value;
        Ok(())
    }

    /// Names accepted by [`Tolerances::set_by_name`].
    pub fn names() -> &'static [&'static str] {
        &[
            "orthonormality",
            "symmetry",
            "extension-property",
            "kernel-identity",
            "krein-formula",
            "unitary-equivalence",
            "unitary-factor",
            "mu-ordering",
            "resolvent-sandwich",
            "spectral-identity",
            "t-norm",
            "correspondence",
            "principal-angle",
            "linear-solve",
            "eigen-residual",
            "inv-sqrt",
            "iterative-vs-dense",
            "condition-cap",
            "zero-eigenvalue",
            "pencil-residual",
        ]
    }
}
