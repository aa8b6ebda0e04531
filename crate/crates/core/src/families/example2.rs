//! A shrinking layer 0 ≤ x ≤ L with one solute, built from the u₁ ≠ 0
//! reduction in its equal-rates Bessel case.
//!
//! Zero initial displacement forces ρ¹ = U₁ = U₀ = 0, u₁ = −2/(kρ_F⁰) and
//! u₀ = kp₁/2; p*(t, 0) = P₀ and ∂c/∂x(t, 0) = 0 fix p₀ = P₀ and
//! A₂ = (A₁/χ)x₀^{1+χ}. Then
//!
//! ```text
//! u  = u₁(x + x₀)t,   ρ = ρ_F⁰,   θ_F = 1 − θ¹/(x + x₀)²
//! p* = P₀ + p₁x + u₁x²/k
//! c  = A₁e^{−u₁t}((x + x₀) + χ⁻¹x₀^{1+χ}(x + x₀)^{−χ})
//! ```
//!
//! The printed displacement is u₁xt, which drops the u₁x₀t term and leaves
//! a porosity residual θ¹x₀/(x + x₀)³.

use serde::{Deserialize, Serialize};

use super::{family72_build, Family72, Family72Mode, Family72Params};
use crate::field::{Domain, FieldSolution};
use crate::model::{ModelParams, StateJet};
use crate::{Fields, Result, ScalarFn, Variant};

/// Dimensionless inputs of the shrinking-layer example.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Fig4Params {
    pub k: f64,
    pub rho_f0: f64,
    pub rt: f64,
    pub p0: f64,
    pub a1: f64,
    pub x0: f64,
    pub l: f64,
    pub theta1: f64,
    pub d1: f64,
}

impl Default for Fig4Params {
    fn default() -> Self {
        Fig4Params {
            k: 2.0,
            rho_f0: 2.0,
            rt: 0.2,
            p0: 1.0,
            a1: 1.0,
            x0: 2.0,
            l: 0.4,
            theta1: 4.0,
            d1: 1.5,
        }
    }
}

impl Fig4Params {
    /// u₁ = v₁ = −2/(kρ_F⁰).
    pub fn u1(&self) -> f64 {
        -2.0 / (self.k * self.rho_f0)
    }

    /// p₁ = −4x₀/(k²ρ_F⁰), from x₀ = u₀/u₁ with u₀ = kp₁/2.
    pub fn p1(&self) -> f64 {
        -4.0 * self.x0 / (self.k * self.k * self.rho_f0)
    }

    /// χ = u₁θ¹/D₁ = −2θ¹/(kρ_F⁰D₁).
    pub fn chi(&self) -> f64 {
        self.u1() * self.theta1 / self.d1
    }

    pub fn a2(&self) -> f64 {
        let chi = self.chi();
        self.a1 / chi * self.x0.powf(1.0 + chi)
    }

    /// Model constants. λ* and the second solute do not enter; σ₁ = S₁ = 1/2
    /// and γ₀ = σ₁ keep the momentum equation free of c.
    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            k: self.k,
            lambda_star: 1.0,
            kappa: 0.0,
            alpha: 0.4,
            rt: self.rt,
            sigma1: 0.5,
            sigma2: 0.0,
            s1: 0.5,
            s2: 0.5,
            d1: self.d1,
            d2: 1.0,
            gamma0: 0.5,
            gamma1: 0.0,
            gamma2: 0.0,
            rho_f0: self.rho_f0,
        }
    }

    fn family_params(&self) -> Family72Params {
        let u1 = self.u1();
        let p1 = self.p1();
        Family72Params {
            u0: 0.5 * self.k * p1,
            u1,
            p0: ScalarFn::constant(self.p0),
            p1,
            rho1: 0.0,
            theta1: self.theta1,
            big_u0: 0.0,
            big_u1: 0.0,
            v1: u1,
            v2: 0.0,
            a11: self.a1,
            a12: self.a2(),
            a21: 0.0,
            a22: 0.0,
            x_range: (0.0, self.l),
            anchor: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Example2 {
    pub fig: Fig4Params,
    pub variant: Variant,
    inner: Family72,
}

pub fn example2_solution(variant: Variant) -> Result<(Example2, Fig4Params, ModelParams)> {
    example2_with(Fig4Params::default(), variant)
}

/// The example for other admissible inputs.
pub fn example2_with(fig: Fig4Params, variant: Variant) -> Result<(Example2, Fig4Params, ModelParams)> {
    let params = fig.model_params().validated()?;
    let inner = family72_build(&params, fig.family_params(), Family72Mode::Bessel, Variant::Corrected)?;
    Ok((Example2 { fig, variant, inner }, fig, params))
}

impl Example2 {
    pub fn jet_at(&self, t: f64, x: f64) -> Result<StateJet> {
        let mut jet = self.inner.jet_at(t, x)?;
        if self.variant == Variant::AsPrinted {
            let shift = self.fig.u1() * self.fig.x0;
            jet.u.v -= shift * t;
            jet.u.t -= shift;
        }
        Ok(jet)
    }
}

impl FieldSolution for Example2 {
    fn domain(&self) -> Domain {
        Domain {
            t: (f64::NEG_INFINITY, f64::INFINITY),
            x: (0.0, self.fig.l),
        }
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        super::fields_or_nan(self.jet_at(t, x))
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        self.jet_at(t, x).ok()
    }
    fn label(&self) -> String {
        format!("example2 ({})", self.variant)
    }
}
