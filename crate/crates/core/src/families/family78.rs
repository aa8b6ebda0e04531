//! Travelling-wave reduction in ω = x − vt with φ₁′ = −1:
//!
//! ```text
//! u  = u₂x² + u₁x + u₀ + vt,   ρ = ρ₀ + s·ω,   θ_F = Θ(ω),   p* = p₁x + p₀(t)
//! cᵢ = e^{−vᵢt} Fᵢ(ω),   Dᵢ F″ + kp₁Sᵢ F′ + vᵢΘ(ω) F = 0
//! ```
//!
//! The momentum equation fixes the density slope s = (p₁ − 2λ*u₂)/v²; the
//! printed slope reads p₁/v₂ and the printed modes take x instead of ω.
//! Exactness needs κu₂ = 0 and the osmotic restrictions.

use serde::{Deserialize, Serialize};

use super::{decay, effective, fields_or_nan, jet_t, jet_wave, jet_x, Profile};
use crate::field::{Domain, FieldSolution};
use crate::model::{Jet, ModelParams, StateJet};
use crate::specfun::{fundamental_system, DEFAULT_TOL};
use crate::{Error, Fields, Result, ScalarFn};

/// Which closure fixes the density slope.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySlope {
    /// (p₁ − 2λ*u₂)/v², forced by the momentum equation.
    #[default]
    Momentum,
    /// p₁/v₂ with v₂ the second solute's rate, as printed.
    PrintedRate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Family78Params {
    pub v: f64,
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub rho0: f64,
    pub p0: ScalarFn,
    pub p1: f64,
    pub v1: f64,
    pub v2: f64,
    /// Θ(ω).
    pub theta_f: ScalarFn,
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    #[serde(default)]
    pub density_slope: DensitySlope,
    pub t_range: (f64, f64),
    pub x_range: (f64, f64),
}

impl Default for Family78Params {
    fn default() -> Self {
        Family78Params {
            v: 1.0,
            u0: 0.0,
            u1: 0.0,
            u2: 0.0,
            rho0: 1.0,
            p0: ScalarFn::zero(),
            p1: 0.0,
            v1: 0.0,
            v2: 0.0,
            theta_f: ScalarFn::constant(1.0),
            a11: 0.0,
            a12: 0.0,
            a21: 0.0,
            a22: 0.0,
            density_slope: DensitySlope::Momentum,
            t_range: (0.0, 1.0),
            x_range: (0.0, 1.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Family78 {
    pub params: ModelParams,
    pub fp: Family78Params,
    pub slope: f64,
    profiles: [Profile; 2],
}

pub fn family78_build(params: &ModelParams, fp: Family78Params) -> Result<Family78> {
    params.validate()?;
    if fp.v == 0.0 {
        return Err(Error::InvalidParam {
            field: "v",
            reason: "wave speed must be nonzero (use family75 or the steady profiles)".into(),
        });
    }
    let (t0, t1) = fp.t_range;
    let (x0, x1) = fp.x_range;
    if !(t1 >= t0 && x1 > x0) {
        return Err(Error::InvalidParam {
            field: "x_range",
            reason: "ranges must be non-empty".into(),
        });
    }
    let slope = match fp.density_slope {
        DensitySlope::Momentum => (fp.p1 - 2.0 * params.lambda_star * fp.u2) / (fp.v * fp.v),
        DensitySlope::PrintedRate => fp.p1 / fp.v2,
    };
    // ω range covered by the (t, x) box, widened for difference stencils.
    let corners = [x0 - fp.v * t0, x0 - fp.v * t1, x1 - fp.v * t0, x1 - fp.v * t1];
    let lo = corners.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = corners.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let margin = 0.05 * (hi - lo) + 0.05 * (1.0 + fp.v.abs());
    let span = (lo - margin, hi + margin);

    let mut profiles = [Profile::Zero, Profile::Zero];
    for i in 0..2 {
        let (d, s, v, a) = if i == 0 {
            (params.d1, params.s1, fp.v1, [fp.a11, fp.a12])
        } else {
            (params.d2, params.s2, fp.v2, [fp.a21, fp.a22])
        };
        if a == [0.0, 0.0] {
            continue;
        }
        let b = params.k * fp.p1 * s;
        let theta = fp.theta_f.clone();
        let pair = fundamental_system(move |w| [d, b, v * theta.value(w)], span.0, span, DEFAULT_TOL)?;
        profiles[i] = Profile::Numeric { pair, a };
    }
    Ok(Family78 {
        params: *params,
        fp,
        slope,
        profiles,
    })
}

impl Family78 {
    pub fn jet_at(&self, t: f64, x: f64) -> Result<StateJet> {
        let fp = &self.fp;
        let w = x - fp.v * t;
        let u = Jet {
            v: fp.u2 * x * x + fp.u1 * x + fp.u0 + fp.v * t,
            t: fp.v,
            x: 2.0 * fp.u2 * x + fp.u1,
            tt: 0.0,
            tx: 0.0,
            xx: 2.0 * fp.u2,
        };
        let rho = jet_wave([fp.rho0 + self.slope * w, self.slope, 0.0], fp.v);
        let th = &fp.theta_f;
        let theta = jet_wave([th.value(w), th.derivative(w, 1), th.derivative(w, 2)], fp.v);
        let p0 = &fp.p0;
        let pressure = jet_x([fp.p1 * x, fp.p1, 0.0]).add(jet_t([p0.value(t), p0.derivative(t, 1), p0.derivative(t, 2)]));
        let c1 = decay(fp.v1, t).mul(jet_wave(self.profiles[0].eval(w)?, fp.v));
        let c2 = decay(fp.v2, t).mul(jet_wave(self.profiles[1].eval(w)?, fp.v));
        Ok(effective(u, rho, pressure, theta, c1, c2))
    }
}

impl FieldSolution for Family78 {
    fn domain(&self) -> Domain {
        Domain {
            t: self.fp.t_range,
            x: self.fp.x_range,
        }
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        fields_or_nan(self.jet_at(t, x))
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        self.jet_at(t, x).ok()
    }
    fn label(&self) -> String {
        "family78".into()
    }
}
