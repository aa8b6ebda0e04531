//! Reduction in x with u₁ = 0:
//!
//! ```text
//! u  = u₀t + p₁x²/(2λ*) + U₁x + U₀,   ρ = ρ⁰,   θ_F = θ_F⁰,   p* = p₁x + p₀(t)
//! cᵢ = e^{−vᵢt} (Aᵢ₁fᵢ₁(x) + Aᵢ₂fᵢ₂(x))
//! Dᵢ f″ + (kp₁Sᵢ − u₀θ_F⁰) f′ + vᵢθ_F⁰ f = 0
//! ```
//!
//! The modes are exponential, repeated-root or oscillatory according to the
//! discriminant. Exactness needs κp₁ = 0 and the osmotic restrictions.

use serde::{Deserialize, Serialize};

use super::{decay, effective, fields_or_nan, jet_t, jet_x, Profile};
use crate::field::{Domain, FieldSolution};
use crate::model::{Jet, ModelParams, StateJet};
use crate::specfun::{constant_coeff_fundamental, CharacteristicRoots};
use crate::{Error, Fields, Result, ScalarFn};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Family75Params {
    pub u0: f64,
    pub theta_f0: f64,
    pub rho0: f64,
    pub p1: f64,
    pub p0: ScalarFn,
    #[serde(rename = "U0")]
    pub big_u0: f64,
    #[serde(rename = "U1")]
    pub big_u1: f64,
    pub v1: f64,
    pub v2: f64,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Default for Family75Params {
    fn default() -> Self {
        Family75Params {
            u0: 0.0,
            theta_f0: 1.0,
            rho0: 1.0,
            p1: 0.0,
            p0: ScalarFn::zero(),
            big_u0: 0.0,
            big_u1: 0.0,
            v1: 0.0,
            v2: 0.0,
            a11: 0.0,
            a12: 0.0,
            a21: 0.0,
            a22: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Family75 {
    pub params: ModelParams,
    pub fp: Family75Params,
    /// Characteristic roots of each solute's mode equation.
    pub roots: [CharacteristicRoots; 2],
    profiles: [Profile; 2],
}

pub fn family75_build(params: &ModelParams, fp: Family75Params) -> Result<Family75> {
    params.validate()?;
    if !(fp.theta_f0 > 0.0 && fp.theta_f0 <= 1.0) {
        return Err(Error::InvalidParam {
            field: "theta_f0",
            reason: format!("must lie in (0, 1], got {}", fp.theta_f0),
        });
    }
    let mut roots = [CharacteristicRoots::Repeated { r: 0.0 }; 2];
    let mut profiles = [Profile::Zero, Profile::Zero];
    for i in 0..2 {
        let (d, s, v, a) = if i == 0 {
            (params.d1, params.s1, fp.v1, [fp.a11, fp.a12])
        } else {
            (params.d2, params.s2, fp.v2, [fp.a21, fp.a22])
        };
        let b = params.k * fp.p1 * s - fp.u0 * fp.theta_f0;
        let c = v * fp.theta_f0;
        if d == 0.0 {
            if a != [0.0, 0.0] {
                return Err(Error::InvalidParam {
                    field: if i == 0 { "d1" } else { "d2" },
                    reason: "mode equation needs a nonzero diffusivity".into(),
                });
            }
            continue;
        }
        let pair = constant_coeff_fundamental(d, b, c)?;
        roots[i] = pair.roots;
        if a != [0.0, 0.0] {
            profiles[i] = Profile::Closed { pair, a };
        }
    }
    Ok(Family75 {
        params: *params,
        fp,
        roots,
        profiles,
    })
}

impl Family75 {
    pub fn jet_at(&self, t: f64, x: f64) -> Result<StateJet> {
        let fp = &self.fp;
        let lam = self.params.lambda_star;
        let u = Jet {
            v: fp.u0 * t + fp.p1 * x * x / (2.0 * lam) + fp.big_u1 * x + fp.big_u0,
            t: fp.u0,
            x: fp.p1 * x / lam + fp.big_u1,
            tt: 0.0,
            tx: 0.0,
            xx: fp.p1 / lam,
        };
        let p0 = &fp.p0;
        let pressure = jet_x([fp.p1 * x, fp.p1, 0.0]).add(jet_t([p0.value(t), p0.derivative(t, 1), p0.derivative(t, 2)]));
        let c1 = decay(fp.v1, t).mul(jet_x(self.profiles[0].eval(x)?));
        let c2 = decay(fp.v2, t).mul(jet_x(self.profiles[1].eval(x)?));
        Ok(effective(
            u,
            Jet::constant(fp.rho0),
            pressure,
            Jet::constant(fp.theta_f0),
            c1,
            c2,
        ))
    }
}

impl FieldSolution for Family75 {
    fn domain(&self) -> Domain {
        Domain::everywhere()
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        fields_or_nan(self.jet_at(t, x))
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        self.jet_at(t, x).ok()
    }
    fn label(&self) -> String {
        "family75".into()
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::{max_of, max_residual};
    use super::*;

    fn params() -> ModelParams {
        ModelParams {
            k: 0.5,
            lambda_star: 3.0,
            d1: 1.0,
            d2: 0.5,
            s1: 0.4,
            s2: 0.6,
            ..ModelParams::default()
        }
    }

    #[test]
    fn harmonic_modes() {
        // D₁ = 1, kp₁S₁ − u₀θ_F⁰ = 0, v₁θ_F⁰ = 1
        let pr = params();
        let fp = Family75Params {
            u0: pr.k * 2.0 * pr.s1,
            p1: 2.0,
            v1: 1.0,
            a11: 1.0,
            ..Family75Params::default()
        };
        let sol = family75_build(&pr, fp).unwrap();
        assert_eq!(sol.roots[0], CharacteristicRoots::Complex { re: 0.0, im: 1.0 });
        let c = sol.jet_at(0.0, 0.8).unwrap().c1.v;
        assert!((c - 0.8f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn every_root_case_is_exact() {
        let pr = params();
        // b = kp₁S − u₀θ; c = vθ. Choose v to land in each case for solute 1.
        let base = Family75Params {
            u0: 0.3,
            theta_f0: 0.8,
            rho0: 1.2,
            p1: 1.5,
            p0: ScalarFn::sine(0.5, 1.0),
            big_u1: 0.1,
            a11: 1.0,
            a12: -0.5,
            a21: 0.3,
            a22: 0.7,
            v2: 0.2,
            ..Family75Params::default()
        };
        let b = pr.k * base.p1 * pr.s1 - base.u0 * base.theta_f0;
        let repeated_v = b * b / (4.0 * pr.d1 * base.theta_f0);
        for (v1, expect) in [(-1.0, "distinct"), (repeated_v, "repeated"), (2.0, "complex")] {
            let fp = Family75Params { v1, ..base.clone() };
            let sol = family75_build(&pr, fp).unwrap();
            let case = match sol.roots[0] {
                CharacteristicRoots::Distinct { .. } => "distinct",
                CharacteristicRoots::Repeated { .. } => "repeated",
                CharacteristicRoots::Complex { .. } => "complex",
            };
            assert_eq!(case, expect);
            let r = max_residual(&sol, &pr, (0.0, 1.0), (-1.0, 1.0), 21);
            assert!(max_of(r) < 1e-10, "{expect}: {r:?}");
        }
    }
}
