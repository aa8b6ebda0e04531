//! Time-dependent exact solutions obtained from the symmetry reductions.
//!
//! Each family is a [`FieldSolution`](crate::FieldSolution) carrying the
//! effective pressure and analytic derivatives. Where the printed closed form
//! does not satisfy the governing system, both the printed form and the
//! corrected one are available through [`Variant`](crate::Variant).
//!
//! | family | reduction variable | modes |
//! |---|---|---|
//! | [`Family68`] | t | exponential in x |
//! | [`Family72`] | x, u₁ ≠ 0 | numeric fundamental system or Bessel |
//! | [`Family75`] | x, u₁ = 0 | constant coefficients |
//! | [`Family78`] | x − vt | numeric fundamental system |
//! | [`example2_solution`] | x | equal-rates Bessel case |

mod example2;
mod family68;
mod family72;
mod family75;
mod family78;

pub use example2::{example2_solution, example2_with, Example2, Fig4Params};
pub use family68::{family68_build, Family68, Family68Params};
pub use family72::{
    bessel_phi5, family72_build, BesselBranch, BesselCaseParams, Family72, Family72Mode, Family72Params,
    Phi5,
};
pub use family75::{family75_build, Family75, Family75Params};
pub use family78::{family78_build, DensitySlope, Family78, Family78Params};

use crate::model::{Jet, PressureKind, StateJet};
use crate::{Fields, Result};

/// Jet of g(t) from g, g′, g″.
fn jet_t([v, d1, d2]: [f64; 3]) -> Jet {
    Jet {
        v,
        t: d1,
        tt: d2,
        ..Jet::default()
    }
}

/// Jet of g(x) from g, g′, g″.
fn jet_x([v, d1, d2]: [f64; 3]) -> Jet {
    Jet {
        v,
        x: d1,
        xx: d2,
        ..Jet::default()
    }
}

/// Jet of F(x − speed·t) from F, F′, F″.
fn jet_wave([v, d1, d2]: [f64; 3], speed: f64) -> Jet {
    Jet {
        v,
        t: -speed * d1,
        x: d1,
        tt: speed * speed * d2,
        tx: -speed * d2,
        xx: d2,
    }
}

/// Jet of a·e^{−rate·t}.
fn decay(rate: f64, t: f64) -> Jet {
    let e = (-rate * t).exp();
    jet_t([e, -rate * e, rate * rate * e])
}

fn effective(u: Jet, rho: Jet, pressure: Jet, theta_f: Jet, c1: Jet, c2: Jet) -> StateJet {
    StateJet {
        pressure_kind: PressureKind::Effective,
        u,
        rho,
        pressure,
        theta_f,
        c1,
        c2,
    }
}

/// Field values of a jet, or NaN everywhere if the jet could not be built.
fn fields_or_nan(jet: Result<StateJet>) -> Fields {
    match jet {
        Ok(j) => Fields::from(&j),
        Err(_) => Fields::from_array([f64::NAN; 6]),
    }
}

/// Linear combination a₁f₁ + a₂f₂ of (f, f′, f″) triples.
fn combine(a1: f64, f1: [f64; 3], a2: f64, f2: [f64; 3]) -> [f64; 3] {
    [
        a1 * f1[0] + a2 * f2[0],
        a1 * f1[1] + a2 * f2[1],
        a1 * f1[2] + a2 * f2[2],
    ]
}


/// Spatial profile of one concentration: a combination of two modes.
#[derive(Clone, Debug)]
enum Profile {
    Zero,
    Numeric {
        pair: crate::specfun::FundamentalPair,
        a: [f64; 2],
    },
    Closed {
        pair: crate::specfun::ConstantCoeffPair,
        a: [f64; 2],
    },
    Bessel(Phi5),
}

impl Profile {
    /// (F, F′, F″) at s.
    fn eval(&self, s: f64) -> Result<[f64; 3]> {
        use crate::specfun::SolutionPair;
        match self {
            Profile::Zero => Ok([0.0; 3]),
            Profile::Numeric { pair, a } => {
                let [f1, f2] = pair.eval(s)?;
                Ok(combine(a[0], f1, a[1], f2))
            }
            Profile::Closed { pair, a } => {
                let [f1, f2] = pair.eval_at(s);
                Ok(combine(a[0], f1, a[1], f2))
            }
            Profile::Bessel(phi) => phi.eval(s),
        }
    }
}
