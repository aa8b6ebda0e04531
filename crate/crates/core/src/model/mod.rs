//! Parameters, pointwise state, constitutive relations and residual forms.
//!
//! The governing system has six unknowns u, ρ, θ_F, c₁, c₂ and a pressure,
//! carried either as the hydrostatic p or as the effective pressure
//!
//! ```text
//! p* = p − T₁ c₁ − α T₂ c₂,   T_i = σ_i RT
//! ```
//!
//! The additive constant in p* is fixed to zero so the transform is
//! invertible pointwise. ρ_M, θ_M and θ₂ are derived views, never state.

mod flux;
mod jet;
mod params;
mod residual;

pub use flux::{compute_fluxes, stress_tensor, FluxBundle};
pub use jet::{from_effective, to_effective, Jet, JetWarning, PressureKind, StateJet};
pub use params::{ModelParams, RESTRICTION_TOL};
pub use residual::{residual_original, residual_starred, ResidualVector};

/// Residuals of a jet in whichever variables it carries.
pub fn residual(jet: &StateJet, params: &ModelParams) -> crate::Result<ResidualVector> {
    match jet.pressure_kind {
        PressureKind::Effective => residual_starred(jet, params),
        PressureKind::Hydrostatic => residual_original(jet, params),
    }
}
