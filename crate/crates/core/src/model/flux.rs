use super::{ModelParams, PressureKind, StateJet};
use crate::Result;

/// Volumetric, solute and mass fluxes at one point, plus the Terzaghi stress.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxBundle {
    /// Fluid-phase volumetric flux (extended Darcy law plus matrix drag).
    pub j_vf: f64,
    /// Matrix-phase volumetric flux.
    pub j_vm: f64,
    /// Total volumetric flux j_VF + j_VM.
    pub j_v: f64,
    pub j1: f64,
    pub j2: f64,
    /// Mass flux ρ_F⁰ j_VF + ρ_M j_VM. `None` when θ_F = 1 leaves ρ_M undefined.
    pub j_rho: Option<f64>,
    pub tau: f64,
}

/// Terzaghi effective stress with the quadratic dilatation term:
///
/// ```text
/// τ = −p + (γ₀+γ₁) RT c₁ + γ₂ RT c₂ + λ* u_x + κ u_x²
/// ```
pub fn stress_tensor(jet: &StateJet, params: &ModelParams) -> Result<f64> {
    jet.expect(PressureKind::Hydrostatic)?;
    let e = jet.u.x;
    Ok(-jet.pressure.v
        + (params.gamma0 + params.gamma1) * params.rt * jet.c1.v
        + params.gamma2 * params.rt * jet.c2.v
        + params.lambda_star * e
        + params.kappa * e * e)
}

pub fn compute_fluxes(jet: &StateJet, params: &ModelParams) -> Result<FluxBundle> {
    jet.expect(PressureKind::Hydrostatic)?;
    let theta = jet.theta_f.v;
    let u_t = jet.u.t;
    let driving =
        jet.pressure.x - params.t1() * jet.c1.x - params.alpha * params.t2() * jet.c2.x;
    let j_vf = -params.k * driving + theta * u_t;
    let j_vm = (1.0 - theta) * u_t;
    let relative = j_vf - theta * u_t;
    let j1 = -params.d1 * jet.c1.x + params.s1 * jet.c1.v * relative + theta * jet.c1.v * u_t;
    let j2 = params.alpha
        * (-params.d2 * jet.c2.x + params.s2 * jet.c2.v * relative + theta * jet.c2.v * u_t);
    let j_rho = jet.rho_m(params).map(|rho_m| params.rho_f0 * j_vf + rho_m * j_vm);
    Ok(FluxBundle {
        j_vf,
        j_vm,
        j_v: j_vf + j_vm,
        j1,
        j2,
        j_rho,
        tau: stress_tensor(jet, params)?,
    })
}
