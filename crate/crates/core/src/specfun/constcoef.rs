//! Closed-form solution pairs of D f″ + b f′ + c f = 0.

use serde::Serialize;

use super::ode::SolutionPair;
use crate::{Error, Result};

/// Roots of D r² + b r + c = 0, classified by the discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum CharacteristicRoots {
    Distinct { r1: f64, r2: f64 },
    Repeated { r: f64 },
    Complex { re: f64, im: f64 },
}

/// {e^{r₁x}, e^{r₂x}}, {e^{rx}, x e^{rx}} or {e^{ax} cos βx, e^{ax} sin βx}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantCoeffPair {
    pub roots: CharacteristicRoots,
}

/// Relative size of the discriminant below which the roots count as repeated.
const REPEATED_REL: f64 = 1e-14;

pub fn constant_coeff_fundamental(d: f64, b: f64, c: f64) -> Result<ConstantCoeffPair> {
    if d == 0.0 || !d.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(Error::InvalidParam {
            field: "D",
            reason: format!("need finite nonzero leading coefficient, got D={d}, b={b}, c={c}"),
        });
    }
    let disc = b * b - 4.0 * d * c;
    let scale = b * b + (4.0 * d * c).abs();
    let roots = if disc.abs() <= REPEATED_REL * scale {
        CharacteristicRoots::Repeated { r: -b / (2.0 * d) }
    } else if disc > 0.0 {
        // Stable form: q = −(b + sign(b)√disc)/2, r₁ = q/D, r₂ = c/q.
        let sq = disc.sqrt();
        let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
        let (r1, r2) = (q / d, c / q);
        let (r1, r2) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        CharacteristicRoots::Distinct { r1, r2 }
    } else {
        CharacteristicRoots::Complex {
            re: -b / (2.0 * d),
            im: (-disc).sqrt() / (2.0 * d).abs(),
        }
    };
    Ok(ConstantCoeffPair { roots })
}

impl ConstantCoeffPair {
    pub fn eval_at(&self, x: f64) -> [[f64; 3]; 2] {
        match self.roots {
            CharacteristicRoots::Distinct { r1, r2 } => {
                let e = |r: f64| {
                    let v = (r * x).exp();
                    [v, r * v, r * r * v]
                };
                [e(r1), e(r2)]
            }
            CharacteristicRoots::Repeated { r } => {
                let v = (r * x).exp();
                [
                    [v, r * v, r * r * v],
                    [x * v, (1.0 + r * x) * v, (2.0 * r + r * r * x) * v],
                ]
            }
            CharacteristicRoots::Complex { re, im } => {
                let e = (re * x).exp();
                let (s, c) = (im * x).sin_cos();
                let (a2, b2) = (re * re - im * im, 2.0 * re * im);
                [
                    [e * c, e * (re * c - im * s), e * (a2 * c - b2 * s)],
                    [e * s, e * (re * s + im * c), e * (a2 * s + b2 * c)],
                ]
            }
        }
    }
}

impl SolutionPair for ConstantCoeffPair {
    fn eval(&self, x: f64) -> Result<[[f64; 3]; 2]> {
        Ok(self.eval_at(x))
    }
}
