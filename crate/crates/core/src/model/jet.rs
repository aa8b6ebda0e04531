use serde::{Deserialize, Serialize};

use super::ModelParams;
use crate::{Error, Result};

/// Which pressure variable a jet or solution carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PressureKind {
    /// Hydrostatic pore pressure p.
    Hydrostatic,
    /// Effective pressure p* = p − T₁c₁ − αT₂c₂.
    Effective,
}

impl std::fmt::Display for PressureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PressureKind::Hydrostatic => f.write_str("hydrostatic"),
            PressureKind::Effective => f.write_str("effective"),
        }
    }
}

/// Value and derivatives up to second order of one field at a point (t, x).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub t: f64,
    pub x: f64,
    pub tt: f64,
    pub tx: f64,
    pub xx: f64,
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        Jet { v, ..Jet::default() }
    }

    pub fn scale(self, s: f64) -> Self {
        Jet {
            v: self.v * s,
            t: self.t * s,
            x: self.x * s,
            tt: self.tt * s,
            tx: self.tx * s,
            xx: self.xx * s,
        }
    }

    pub fn add(self, o: Jet) -> Self {
        Jet {
            v: self.v + o.v,
            t: self.t + o.t,
            x: self.x + o.x,
            tt: self.tt + o.tt,
            tx: self.tx + o.tx,
            xx: self.xx + o.xx,
        }
    }

    /// Jet of the product of two fields.
    pub fn mul(self, o: Jet) -> Self {
        Jet {
            v: self.v * o.v,
            t: self.t * o.v + self.v * o.t,
            x: self.x * o.v + self.v * o.x,
            tt: self.tt * o.v + 2.0 * self.t * o.t + self.v * o.tt,
            tx: self.tx * o.v + self.t * o.x + self.x * o.t + self.v * o.tx,
            xx: self.xx * o.v + 2.0 * self.x * o.x + self.v * o.xx,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.t, self.x, self.tt, self.tx, self.xx]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// The six state fields and their derivatives at one point.
///
/// The dilatation e is `u.x`. Only one pressure variable is present; which
/// one is recorded in `pressure_kind`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateJet {
    pub pressure_kind: PressureKind,
    pub u: Jet,
    pub rho: Jet,
    pub pressure: Jet,
    pub theta_f: Jet,
    pub c1: Jet,
    pub c2: Jet,
}

/// Soft physical-range violations. They are reported, never fatal, because
/// exact families admit parameter choices outside the physical ranges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetWarning {
    PorosityOutOfRange(f64),
    NonPositiveDensity(f64),
}

impl StateJet {
    pub fn constant(pressure_kind: PressureKind, values: [f64; 6]) -> Self {
        let [u, rho, p, theta_f, c1, c2] = values;
        StateJet {
            pressure_kind,
            u: Jet::constant(u),
            rho: Jet::constant(rho),
            pressure: Jet::constant(p),
            theta_f: Jet::constant(theta_f),
            c1: Jet::constant(c1),
            c2: Jet::constant(c2),
        }
    }

    /// Dilatation e = ∂u/∂x.
    pub fn dilatation(&self) -> f64 {
        self.u.x
    }

    pub fn warnings(&self) -> Vec<JetWarning> {
        let mut out = Vec::new();
        if !(self.theta_f.v > 0.0 && self.theta_f.v < 1.0) {
            out.push(JetWarning::PorosityOutOfRange(self.theta_f.v));
        }
        if self.rho.v <= 0.0 {
            out.push(JetWarning::NonPositiveDensity(self.rho.v));
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        [self.u, self.rho, self.pressure, self.theta_f, self.c1, self.c2]
            .iter()
            .all(Jet::is_finite)
    }

    pub fn expect(&self, kind: PressureKind) -> Result<()> {
        if self.pressure_kind == kind {
            Ok(())
        } else {
            Err(Error::PressureKind {
                expected: kind,
                found: self.pressure_kind,
            })
        }
    }

    /// Matrix volume fraction θ_M = 1 − θ_F.
    pub fn theta_m(&self) -> f64 {
        1.0 - self.theta_f.v
    }

    /// Large-pore volume fraction θ₂ = α θ_F.
    pub fn theta_2(&self, params: &ModelParams) -> f64 {
        params.alpha * self.theta_f.v
    }

    /// Matrix density from ρ = ρ_F⁰ θ_F + ρ_M θ_M; undefined when θ_F = 1.
    pub fn rho_m(&self, params: &ModelParams) -> Option<f64> {
        let theta_m = self.theta_m();
        (theta_m != 0.0).then(|| (self.rho.v - params.rho_f0 * self.theta_f.v) / theta_m)
    }
}

/// The osmotic part T₁c₁ + αT₂c₂ that separates p from p*.
fn osmotic_jet(jet: &StateJet, params: &ModelParams) -> Jet {
    jet.c1
        .scale(params.t1())
        .add(jet.c2.scale(params.alpha * params.t2()))
}

/// p ↦ p* = p − T₁c₁ − αT₂c₂, applied to the value and every derivative.
pub fn to_effective(jet: &StateJet, params: &ModelParams) -> Result<StateJet> {
    jet.expect(PressureKind::Hydrostatic)?;
    Ok(StateJet {
        pressure_kind: PressureKind::Effective,
        pressure: jet.pressure.add(osmotic_jet(jet, params).scale(-1.0)),
        ..*jet
    })
}

/// p* ↦ p = p* + T₁c₁ + αT₂c₂.
pub fn from_effective(jet: &StateJet, params: &ModelParams) -> Result<StateJet> {
    jet.expect(PressureKind::Effective)?;
    Ok(StateJet {
        pressure_kind: PressureKind::Hydrostatic,
        pressure: jet.pressure.add(osmotic_jet(jet, params)),
        ..*jet
    })
}
