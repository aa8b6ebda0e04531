//! Two-solute transport in a one-dimensional poroelastic layer.
//!
//! The crate is organised around a single verification idea: every candidate
//! solution of the governing system, whether closed-form, symmetry-reduced or
//! produced by the finite-difference solver, is a [`FieldSolution`] and can be
//! substituted back into the six residual forms of [`model`].
//!
//! - [`model`]: parameters, pointwise state jets, stress, fluxes, the effective
//!   pressure transform and the residual forms in both variable sets.
//! - [`steady`]: closed-form steady profiles and displacement (linear, exact
//!   quadrature, Taylor) plus the healthy/tumour tissue reconstruction.
//! - [`families`]: time-dependent exact solution families and the shrinking
//!   layer example, in as-printed and residual-corrected form.
//! - [`specfun`]: Bessel functions of real order, fundamental systems of linear
//!   second-order ODEs, adaptive quadrature and bracketed root finding.
//! - [`solver`]: residual scans, the method-of-lines IBVP solver and observed
//!   order estimation.
//! - [`symmetry`]: finite symmetry transformations and orbit checks.
//! - [`scenario`]: JSON scenarios, CSV emission and the discrepancy report.

pub mod error;
pub mod families;
pub mod field;
pub mod func;
pub mod model;
pub mod scenario;
pub mod solver;
pub mod specfun;
pub mod steady;
pub mod symmetry;

pub use error::{Error, Result};
pub use field::{Domain, FieldSolution, Fields};
pub use func::ScalarFn;
pub use model::{ModelParams, PressureKind, StateJet};

/// Which form of a printed formula to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The formula exactly as printed.
    AsPrinted,
    /// The form that satisfies the governing equations.
    Corrected,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::AsPrinted => f.write_str("as_printed"),
            Variant::Corrected => f.write_str("corrected"),
        }
    }
}
