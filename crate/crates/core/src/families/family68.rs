//! Reduction in t: u = u₁x + u₂x² + f(t), constant ρ and θ_F, p* affine in x,
//! and exponential concentration modes
//!
//! ```text
//! p* = (2λ*u₂ − ρ⁰f″)x + p₀(t)
//! cᵢ = Aᵢ exp(wᵢ(−x + f + (vᵢt + ρ⁰kSᵢf′)/θ_F⁰)),  vᵢ = wᵢDᵢ − 2kλ*u₂Sᵢ
//! ```
//!
//! The printed form lacks λ* in the pressure slope and in vᵢ and the 1/θ_F⁰
//! factor in the exponent; it is exact only for λ* = 1, θ_F⁰ = 1.
//! Exactness also needs κu₂ = 0 and, when the concentrations vary, the
//! osmotic restrictions.

use log::warn;
use serde::{Deserialize, Serialize};

use super::{effective, fields_or_nan, jet_t, jet_x};
use crate::field::{Domain, FieldSolution};
use crate::model::{Jet, ModelParams, StateJet};
use crate::{Error, Fields, Result, ScalarFn, Variant};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Family68Params {
    pub u1: f64,
    pub u2: f64,
    pub w1: f64,
    pub w2: f64,
    pub a1: f64,
    pub a2: f64,
    pub rho0: f64,
    pub theta_f0: f64,
    pub f: ScalarFn,
    pub p0: ScalarFn,
}

impl Default for Family68Params {
    fn default() -> Self {
        Family68Params {
            u1: 0.0,
            u2: 0.0,
            w1: 1.0,
            w2: 1.0,
            a1: 1.0,
            a2: 1.0,
            rho0: 1.0,
            theta_f0: 1.0,
            f: ScalarFn::zero(),
            p0: ScalarFn::zero(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Family68 {
    pub params: ModelParams,
    pub fp: Family68Params,
    pub variant: Variant,
    pub domain: Domain,
}

pub fn family68_build(params: &ModelParams, fp: Family68Params, variant: Variant) -> Result<Family68> {
    params.validate()?;
    if !(fp.theta_f0 > 0.0 && fp.theta_f0 <= 1.0) {
        return Err(Error::InvalidParam {
            field: "theta_f0",
            reason: format!("must lie in (0, 1], got {}", fp.theta_f0),
        });
    }
    if params.kappa * fp.u2 != 0.0 {
        warn!("family68 is not exact for kappa * u2 != 0");
    }
    Ok(Family68 {
        params: *params,
        fp,
        variant,
        domain: Domain::everywhere(),
    })
}

impl Family68 {
    /// Temporal rates vᵢ in the variant's convention.
    pub fn rates(&self) -> [f64; 2] {
        let fp = &self.fp;
        let pr = &self.params;
        let lam = self.lambda_factor();
        [
            fp.w1 * pr.d1 - 2.0 * pr.k * lam * fp.u2 * pr.s1,
            fp.w2 * pr.d2 - 2.0 * pr.k * lam * fp.u2 * pr.s2,
        ]
    }

    fn lambda_factor(&self) -> f64 {
        match self.variant {
            Variant::AsPrinted => 1.0,
            Variant::Corrected => self.params.lambda_star,
        }
    }

    fn theta_factor(&self) -> f64 {
        match self.variant {
            Variant::AsPrinted => 1.0,
            Variant::Corrected => self.fp.theta_f0,
        }
    }

    fn f_derivs(&self, t: f64) -> [f64; 4] {
        let f = &self.fp.f;
        [f.value(t), f.derivative(t, 1), f.derivative(t, 2), f.derivative(t, 3)]
    }

    fn concentration(&self, amplitude: f64, w: f64, v: f64, s: f64, t: f64, x: f64) -> Jet {
        let [f, f1, f2, f3] = self.f_derivs(t);
        let a = self.fp.rho0 * self.params.k * s;
        let th = self.theta_factor();
        // exponent w(−x + g(t))
        let g = f + (v * t + a * f1) / th;
        let g1 = f1 + (v + a * f2) / th;
        let g2 = f2 + a * f3 / th;
        let e = amplitude * (w * (g - x)).exp();
        Jet {
            v: e,
            t: w * g1 * e,
            x: -w * e,
            tt: (w * g2 + w * w * g1 * g1) * e,
            tx: -w * w * g1 * e,
            xx: w * w * e,
        }
    }

    pub fn jet_at(&self, t: f64, x: f64) -> StateJet {
        let fp = &self.fp;
        let [f, f1, f2, f3] = self.f_derivs(t);
        let u = jet_x([fp.u1 * x + fp.u2 * x * x, fp.u1 + 2.0 * fp.u2 * x, 2.0 * fp.u2]).add(jet_t([f, f1, f2]));
        let slope = 2.0 * self.lambda_factor() * fp.u2 - fp.rho0 * f2;
        let p0 = &fp.p0;
        let pressure = Jet {
            v: slope * x + p0.value(t),
            t: -fp.rho0 * f3 * x + p0.derivative(t, 1),
            x: slope,
            tt: -fp.rho0 * fp.f.derivative(t, 4) * x + p0.derivative(t, 2),
            tx: -fp.rho0 * f3,
            xx: 0.0,
        };
        let [v1, v2] = self.rates();
        let c1 = self.concentration(fp.a1, fp.w1, v1, self.params.s1, t, x);
        let c2 = self.concentration(fp.a2, fp.w2, v2, self.params.s2, t, x);
        effective(u, Jet::constant(fp.rho0), pressure, Jet::constant(fp.theta_f0), c1, c2)
    }
}

impl FieldSolution for Family68 {
    fn domain(&self) -> Domain {
        self.domain
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        fields_or_nan(Ok(self.jet_at(t, x)))
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        Some(self.jet_at(t, x))
    }
    fn label(&self) -> String {
        format!("family68 ({})", self.variant)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::{max_of, max_residual};
    use super::*;

    fn params() -> ModelParams {
        ModelParams {
            k: 0.3,
            lambda_star: 2.0,
            d1: 0.7,
            d2: 0.4,
            s1: 0.5,
            s2: 0.2,
            ..ModelParams::default()
        }
    }

    #[test]
    fn plain_travelling_exponential() {
        let fp = Family68Params {
            w1: 1.3,
            ..Family68Params::default()
        };
        let sol = family68_build(&params(), fp, Variant::Corrected).unwrap();
        let pr = params();
        let c = sol.jet_at(0.7, 0.2).c1.v;
        let expected = (1.3 * (-0.2 + 1.3 * pr.d1 * 0.7)).exp();
        assert!((c - expected).abs() < 1e-14);
        let r = max_residual(&sol, &pr, (0.0, 1.0), (0.0, 1.0), 11);
        assert!(max_of(r) < 1e-12, "{r:?}");
    }

    #[test]
    fn oscillating_f_is_exact() {
        let fp = Family68Params {
            u1: 0.2,
            u2: 0.5,
            w1: 1.0,
            w2: -0.5,
            f: ScalarFn::sine(0.1, 1.0),
            p0: ScalarFn::sine(1.0, 2.0),
            ..Family68Params::default()
        };
        let sol = family68_build(&params(), fp, Variant::Corrected).unwrap();
        let r = max_residual(&sol, &params(), (0.0, 3.0), (-1.0, 1.0), 31);
        assert!(max_of(r) < 1e-10, "{r:?}");
    }

    #[test]
    fn printed_form_fails_for_partial_porosity() {
        let pr = params();
        let fp = Family68Params {
            theta_f0: 0.5,
            w1: 1.2,
            ..Family68Params::default()
        };
        let printed = family68_build(&pr, fp.clone(), Variant::AsPrinted).unwrap();
        let jet = printed.jet_at(0.3, 0.1);
        let r = crate::model::residual_starred(&jet, &pr).unwrap();
        let predicted = -(1.0 - 0.5) * 1.2 * 1.2 * pr.d1 * jet.c1.v;
        assert!((r[3] - predicted).abs() < 1e-12 * predicted.abs());
        let corrected = family68_build(&pr, fp, Variant::Corrected).unwrap();
        let r = max_residual(&corrected, &pr, (0.0, 1.0), (0.0, 1.0), 11);
        assert!(max_of(r) < 1e-10);
    }

    #[test]
    fn printed_pressure_slope_misses_modulus() {
        let pr = params();
        let fp = Family68Params {
            u2: 0.5,
            ..Family68Params::default()
        };
        let printed = family68_build(&pr, fp, Variant::AsPrinted).unwrap();
        let r = crate::model::residual_starred(&printed.jet_at(0.0, 0.0), &pr).unwrap();
        // r₆ = −2λ*u₂ + 2u₂
        assert!((r[5] - (-2.0 * pr.lambda_star * 0.5 + 1.0)).abs() < 1e-14);
    }

    #[test]
    fn variants_coincide_for_unit_modulus_and_porosity() {
        let pr = ModelParams {
            lambda_star: 1.0,
            ..params()
        };
        let fp = Family68Params {
            u2: 0.3,
            f: ScalarFn::sine(0.1, 1.0),
            ..Family68Params::default()
        };
        let a = family68_build(&pr, fp.clone(), Variant::AsPrinted).unwrap();
        let b = family68_build(&pr, fp, Variant::Corrected).unwrap();
        assert_eq!(a.jet_at(0.4, 0.6), b.jet_at(0.4, 0.6));
    }

    #[test]
    fn rejects_porosity_outside_unit_interval() {
        let fp = Family68Params {
            theta_f0: 1.5,
            ..Family68Params::default()
        };
        assert!(family68_build(&params(), fp, Variant::Corrected).is_err());
    }
}
