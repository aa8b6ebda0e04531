use super::{ModelParams, PressureKind, StateJet};
use crate::Result;

/// Signed residuals of the six governing equations at one point, ordered:
/// volume balance, mass balance, fluid fraction, small solute, large solute,
/// momentum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResidualVector(pub [f64; 6]);

impl ResidualVector {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|r| r.is_finite())
    }
}

impl std::ops::Index<usize> for ResidualVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Residuals in the effective-pressure variables:
///
/// ```text
/// r1 = 2u_tx − k p*_xx
/// r2 = ρ_t + ρ_x u_t − k(ρ_F⁰ − ρ) p*_xx
/// r3 = θ_t + θ_x u_t − k(1 − θ) p*_xx
/// r4 = (θc₁)_t + (θc₁)_x u_t + 2θc₁u_tx − D₁c₁_xx − kS₁(c₁ p*_x)_x
/// r5 = same for c₂ with D₂, S₂
/// r6 = ρu_tt + ρ_t u_t + ρu_t u_tx − λ*u_xx − 2κu_x u_xx + p*_x
///      − (γ₀+γ₁−σ₁)RT c₁_x − (γ₂−ασ₂)RT c₂_x
/// ```
pub fn residual_starred(jet: &StateJet, params: &ModelParams) -> Result<ResidualVector> {
    jet.expect(PressureKind::Effective)?;
    let ps = &jet.pressure;
    Ok(assemble(
        jet,
        params,
        ps.x,
        ps.xx,
        ps.x - params.small_mismatch() * params.rt * jet.c1.x
            - params.large_mismatch() * params.rt * jet.c2.x,
    ))
}

/// Residuals in the hydrostatic-pressure variables. The effective pressure
/// gradient is formed from p and the concentration gradients directly, and
/// the momentum coupling uses the full osmotic stress coefficients.
pub fn residual_original(jet: &StateJet, params: &ModelParams) -> Result<ResidualVector> {
    jet.expect(PressureKind::Hydrostatic)?;
    let p = &jet.pressure;
    let at2 = params.alpha * params.t2();
    let grad = p.x - params.t1() * jet.c1.x - at2 * jet.c2.x;
    let lap = p.xx - params.t1() * jet.c1.xx - at2 * jet.c2.xx;
    let stress_grad = p.x
        - (params.gamma0 + params.gamma1) * params.rt * jet.c1.x
        - params.gamma2 * params.rt * jet.c2.x;
    Ok(assemble(jet, params, grad, lap, stress_grad))
}

/// Shared assembly given the effective pressure gradient and Laplacian and the
/// pressure-like forcing of the momentum equation.
fn assemble(
    jet: &StateJet,
    params: &ModelParams,
    grad: f64,
    lap: f64,
    momentum_forcing: f64,
) -> ResidualVector {
    let k = params.k;
    let u = &jet.u;
    let rho = &jet.rho;
    let th = &jet.theta_f;

    let r1 = 2.0 * u.tx - k * lap;
    let r2 = rho.t + rho.x * u.t - k * (params.rho_f0 - rho.v) * lap;
    let r3 = th.t + th.x * u.t - k * (1.0 - th.v) * lap;

    let solute = |c: &super::Jet, d: f64, s: f64| {
        let q_t = th.t * c.v + th.v * c.t;
        let q_x = th.x * c.v + th.v * c.x;
        q_t + q_x * u.t + 2.0 * th.v * c.v * u.tx - d * c.xx - k * s * (c.x * grad + c.v * lap)
    };
    let r4 = solute(&jet.c1, params.d1, params.s1);
    let r5 = solute(&jet.c2, params.d2, params.s2);

    let r6 = rho.v * u.tt + rho.t * u.t + rho.v * u.t * u.tx
        - params.lambda_star * u.xx
        - 2.0 * params.kappa * u.x * u.xx
        + momentum_forcing;

    ResidualVector([r1, r2, r3, r4, r5, r6])
}
