use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Physical constants of the governing system.
///
/// Units follow one consistent convention (pressure in mmHg, length in cm,
/// concentration in mmol/L, time compatible with `k` and the diffusivities);
/// nothing here enforces it. `lambda_star` is the combined elastic modulus
/// λ + 2μ; the Lamé constants never appear separately.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Hydraulic conductivity.
    pub k: f64,
    pub lambda_star: f64,
    /// Coefficient of the quadratic stress term κ u_x².
    pub kappa: f64,
    /// Large-pore fraction: θ₂ = α θ_F.
    pub alpha: f64,
    /// Gas constant times temperature.
    pub rt: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub s1: f64,
    pub s2: f64,
    pub d1: f64,
    pub d2: f64,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Density of the (incompressible) pore fluid.
    pub rho_f0: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            lambda_star: 100.0,
            kappa: 0.0,
            alpha: 0.4,
            rt: 1.0,
            sigma1: 0.0,
            sigma2: 0.0,
            s1: 0.5,
            s2: 0.5,
            d1: 1.0,
            d2: 1.0,
            gamma0: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            rho_f0: 1.0,
        }
    }
}

/// Relative slack allowed when testing the osmotic restrictions.
pub const RESTRICTION_TOL: f64 = 1e-12;

impl ModelParams {
    /// σ₁ RT
    pub fn t1(&self) -> f64 {
        self.sigma1 * self.rt
    }

    /// σ₂ RT
    pub fn t2(&self) -> f64 {
        self.sigma2 * self.rt
    }

    /// γ₀ + γ₁ − σ₁; zero when small molecules exert exactly their reflected
    /// osmotic pressure on the matrix.
    pub fn small_mismatch(&self) -> f64 {
        self.gamma0 + self.gamma1 - self.sigma1
    }

    /// γ₂ − α σ₂
    pub fn large_mismatch(&self) -> f64 {
        self.gamma2 - self.alpha * self.sigma2
    }

    /// Both osmotic restrictions hold (to rounding of the inputs), so the
    /// momentum equation does not see the concentrations.
    pub fn gamma_restricted(&self) -> bool {
        let scale1 = 1.0 + self.gamma0.abs() + self.gamma1.abs() + self.sigma1.abs();
        let scale2 = 1.0 + self.gamma2.abs() + self.sigma2.abs();
        self.small_mismatch().abs() <= RESTRICTION_TOL * scale1
            && self.large_mismatch().abs() <= RESTRICTION_TOL * scale2
    }

    /// k α ρ_F⁰ D_i S_i ≠ 0 for both solutes.
    pub fn is_generic(&self) -> bool {
        self.k * self.alpha * self.rho_f0 * self.d1 * self.s1 != 0.0
            && self.k * self.alpha * self.rho_f0 * self.d2 * self.s2 != 0.0
    }

    /// Checks every range constraint and returns the parameters unchanged.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, f64); 15] = [
            ("k", self.k),
            ("lambda_star", self.lambda_star),
            ("kappa", self.kappa),
            ("alpha", self.alpha),
            ("rt", self.rt),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
            ("s1", self.s1),
            ("s2", self.s2),
            ("d1", self.d1),
            ("d2", self.d2),
            ("gamma0", self.gamma0),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("rho_f0", self.rho_f0),
        ];
        for (field, value) in fields {
            if !value.is_finite() {
                return Err(invalid(field, format!("must be finite, got {value}")));
            }
        }
        positive("k", self.k)?;
        positive("lambda_star", self.lambda_star)?;
        positive("rho_f0", self.rho_f0)?;
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(invalid("alpha", format!("requires 0 <= alpha < 1, got {}", self.alpha)));
        }
        unit_interval("sigma1", self.sigma1)?;
        unit_interval("sigma2", self.sigma2)?;
        unit_interval("s1", self.s1)?;
        unit_interval("s2", self.s2)?;
        non_negative("d1", self.d1)?;
        non_negative("d2", self.d2)?;
        for (field, g) in [("gamma0", self.gamma0), ("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if g > 1.0 {
                return Err(invalid(field, format!("osmotic pore coefficient must be <= 1, got {g}")));
            }
        }
        Ok(())
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidParam { field, reason }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be > 0, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be >= 0, got {v}")))
    }
}

fn unit_interval(field: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(field, format!("must lie in [0, 1], got {v}")))
    }
}
