//! Reduction in x with u₁ ≠ 0. With y = x + x₀, x₀ = u₀/u₁:
//!
//! ```text
//! u  = u₁yt + φ₁(x)
//! ρ  = ρ_F⁰ + ρ¹y⁻²,   θ_F = 1 − θ¹y⁻²,   p* = u₁x²/k + p₁x + p₀(t)
//! cᵢ = e^{−vᵢt} Fᵢ(x)
//! Dᵢ F″ + (u₁θ¹/y + u₁(2Sᵢ−1)x + βᵢ₁) F′ + (−vᵢθ¹/y² + βᵢ₂) F = 0
//! βᵢ₁ = kp₁Sᵢ − u₀,   βᵢ₂ = 2u₁(Sᵢ−1) + vᵢ
//! ```
//!
//! φ₁ = (u₁²ρ¹/λ*) y ln|y| + u₁(2+u₁kρ_F⁰)y³/(6kλ*) + (kp₁−2u₀)y²/(2kλ*)
//! + U₁x + U₀. Exactness needs κ = 0 and the osmotic restrictions.
//!
//! The mode equation is solved numerically, or, for S₁ = 1/2 and u₀ = kp₁/2,
//! in closed form through Bessel functions:
//!
//! ```text
//! y²F″ + χyF′ − (v₁θ¹/D₁ + (u₁−v₁)y²/D₁)F = 0,   χ = u₁θ¹/D₁
//! F = y^{(1−χ)/2} (A₁Z_ν(|B|y) + A₂W_ν(|B|y)),   ν = ½√((χ−1)² + 4v₁θ¹/D₁)
//! ```
//!
//! with (Z, W) = (J, Y) for B² = (v₁−u₁)/D₁ > 0, (I, K) for B² < 0 and
//! F = A₁y + A₂y^{−χ} when u₁ = v₁. The printed Bessel branches omit the
//! y^{(1−χ)/2} prefactor.

use serde::{Deserialize, Serialize};

use super::{decay, effective, fields_or_nan, jet_t, jet_x, Profile};
use crate::field::{Domain, FieldSolution};
use crate::model::{Jet, ModelParams, StateJet};
use crate::specfun::{bessel_with_derivative, fundamental_system, BesselKind, DEFAULT_TOL};
use crate::{Error, Fields, Result, ScalarFn, Variant};

/// Distance kept from the singular point y = 0.
const SINGULAR_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Family72Params {
    pub u0: f64,
    pub u1: f64,
    pub p0: ScalarFn,
    pub p1: f64,
    pub rho1: f64,
    pub theta1: f64,
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
    /// Spatial extent of the solution.
    pub x_range: (f64, f64),
    /// Normalisation point of the numeric modes; defaults to the left end.
    #[serde(default)]
    pub anchor: Option<f64>,
}

impl Default for Family72Params {
    fn default() -> Self {
        Family72Params {
            u0: 1.0,
            u1: 1.0,
            p0: ScalarFn::zero(),
            p1: 0.0,
            rho1: 0.0,
            theta1: 0.0,
            big_u0: 0.0,
            big_u1: 0.0,
            v1: 0.0,
            v2: 0.0,
            a11: 0.0,
            a12: 0.0,
            a21: 0.0,
            a22: 0.0,
            x_range: (0.0, 1.0),
            anchor: None,
        }
    }
}

impl Family72Params {
    pub fn x0(&self) -> f64 {
        self.u0 / self.u1
    }

    pub fn beta(&self, params: &ModelParams, solute: usize) -> (f64, f64) {
        let (s, v) = if solute == 0 {
            (params.s1, self.v1)
        } else {
            (params.s2, self.v2)
        };
        (
            params.k * self.p1 * s - self.u0,
            2.0 * self.u1 * (s - 1.0) + v,
        )
    }

    /// Coefficients [a, b, c] of the mode equation for solute 0 or 1.
    pub fn mode_coefficients(&self, params: &ModelParams, solute: usize) -> impl Fn(f64) -> [f64; 3] + Send + Sync {
        let (d, s, v) = if solute == 0 {
            (params.d1, params.s1, self.v1)
        } else {
            (params.d2, params.s2, self.v2)
        };
        let (b1, b2) = self.beta(params, solute);
        let (u1, th1, x0) = (self.u1, self.theta1, self.x0());
        move |x: f64| {
            let y = x + x0;
            [
                d,
                u1 * th1 / y + u1 * (2.0 * s - 1.0) * x + b1,
                -v * th1 / (y * y) + b2,
            ]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family72Mode {
    /// Both concentrations from numerically integrated fundamental systems.
    Numeric,
    /// c₁ from the Bessel closed form, c₂ numeric.
    Bessel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BesselBranch {
    EqualRates,
    /// J_ν, Y_ν.
    Oscillatory,
    /// I_ν, K_ν.
    Modified,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselCaseParams {
    pub chi: f64,
    pub nu: f64,
    /// |B|, zero on the equal-rates branch.
    pub b: f64,
    pub branch: BesselBranch,
    pub x0: f64,
    /// v₁θ¹/D₁ and (u₁−v₁)/D₁, kept for the defining operator.
    pub q0: f64,
    pub q2: f64,
}

impl BesselCaseParams {
    pub fn new(params: &ModelParams, fp: &Family72Params) -> Result<Self> {
        if (params.s1 - 0.5).abs() > 1e-12 {
            return Err(Error::Branch(format!("Bessel case needs S1 = 1/2, got {}", params.s1)));
        }
        let half = 0.5 * params.k * fp.p1;
        if (fp.u0 - half).abs() > 1e-12 * half.abs().max(1.0) {
            return Err(Error::Branch(format!(
                "Bessel case needs u0 = k p1 / 2 = {half}, got {}",
                fp.u0
            )));
        }
        if params.d1 == 0.0 {
            return Err(Error::Branch("Bessel case needs D1 != 0".into()));
        }
        let d = params.d1;
        let chi = fp.u1 * fp.theta1 / d;
        let q0 = fp.v1 * fp.theta1 / d;
        let q2 = (fp.u1 - fp.v1) / d;
        let nu_squared = 0.25 * ((chi - 1.0).powi(2) + 4.0 * q0);
        if nu_squared < 0.0 {
            return Err(Error::ComplexOrder { nu_squared });
        }
        let scale = fp.u1.abs().max(fp.v1.abs()).max(1.0);
        let branch = if (fp.u1 - fp.v1).abs() <= 1e-14 * scale {
            BesselBranch::EqualRates
        } else if q2 < 0.0 {
            BesselBranch::Oscillatory
        } else {
            BesselBranch::Modified
        };
        let b = if branch == BesselBranch::EqualRates {
            0.0
        } else {
            q2.abs().sqrt()
        };
        Ok(BesselCaseParams {
            chi,
            nu: nu_squared.sqrt(),
            b,
            branch,
            x0: fp.x0(),
            q0,
            q2,
        })
    }

    /// Coefficients of y²F″ + χyF′ − (q₀ + q₂y²)F = 0 written in x.
    pub fn operator(&self) -> impl Fn(f64) -> [f64; 3] + Send + Sync {
        let (chi, q0, q2, x0) = (self.chi, self.q0, self.q2, self.x0);
        move |x: f64| {
            let y = x + x0;
            [y * y, chi * y, -(q0 + q2 * y * y)]
        }
    }
}

/// The Bessel-case profile A₁·(first solution) + A₂·(second solution).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Phi5 {
    pub bp: BesselCaseParams,
    pub a1: f64,
    pub a2: f64,
    pub variant: Variant,
}

pub fn bessel_phi5(bp: BesselCaseParams, a1: f64, a2: f64, variant: Variant) -> Phi5 {
    Phi5 { bp, a1, a2, variant }
}

impl Phi5 {
    /// (φ₅, φ₅′, φ₅″) at x.
    pub fn eval(&self, x: f64) -> Result<[f64; 3]> {
        let bp = &self.bp;
        let y = x + bp.x0;
        if y <= 0.0 {
            return Err(Error::Domain {
                at: x,
                reason: format!("x + x0 = {y} must be positive"),
            });
        }
        if self.a1 == 0.0 && self.a2 == 0.0 {
            return Ok([0.0; 3]);
        }
        if bp.branch == BesselBranch::EqualRates {
            let chi = bp.chi;
            let w = self.a2 * y.powf(-chi);
            return Ok([
                self.a1 * y + w,
                self.a1 - chi * w / y,
                chi * (chi + 1.0) * w / (y * y),
            ]);
        }
        let (k1, k2, sign) = match bp.branch {
            BesselBranch::Oscillatory => (BesselKind::J, BesselKind::Y, -1.0),
            _ => (BesselKind::I, BesselKind::K, 1.0),
        };
        let (b, nu) = (bp.b, bp.nu);
        let z = b * y;
        let mut g = [0.0; 3];
        for (kind, amp) in [(k1, self.a1), (k2, self.a2)] {
            if amp == 0.0 {
                continue;
            }
            let (zv, zd) = bessel_with_derivative(kind, nu, z)?;
            // z²Z″ + zZ′ ± (z² ∓ ν²)Z = 0
            let zdd = -zd / z + sign * zv + nu * nu / (z * z) * zv;
            g[0] += amp * zv;
            g[1] += amp * b * zd;
            g[2] += amp * b * b * zdd;
        }
        if self.variant == Variant::AsPrinted {
            return Ok(g);
        }
        let a = 0.5 * (1.0 - bp.chi);
        let ya = y.powf(a);
        Ok([
            ya * g[0],
            ya * (a * g[0] / y + g[1]),
            ya * (a * (a - 1.0) * g[0] / (y * y) + 2.0 * a * g[1] / y + g[2]),
        ])
    }
}

#[derive(Clone, Debug)]
pub struct Family72 {
    pub params: ModelParams,
    pub fp: Family72Params,
    pub mode: Family72Mode,
    pub variant: Variant,
    profiles: [Profile; 2],
}

pub fn family72_build(
    params: &ModelParams,
    fp: Family72Params,
    mode: Family72Mode,
    variant: Variant,
) -> Result<Family72> {
    params.validate()?;
    if fp.u1 == 0.0 {
        return Err(Error::InvalidParam {
            field: "u1",
            reason: "must be nonzero (use family75 for u1 = 0)".into(),
        });
    }
    let (lo, hi) = fp.x_range;
    if !(hi > lo) {
        return Err(Error::InvalidParam {
            field: "x_range",
            reason: format!("empty range ({lo}, {hi})"),
        });
    }
    let x0 = fp.x0();
    // The solution is singular at y = 0; the whole range must sit on one side.
    if lo + x0 <= SINGULAR_MARGIN && hi + x0 >= -SINGULAR_MARGIN {
        return Err(Error::Domain {
            at: -x0,
            reason: "singular point x = -x0 inside the evaluation range".into(),
        });
    }
    // A margin beyond the range keeps finite-difference stencils inside the
    // integrated span.
    let width = hi - lo;
    let mut margin = 0.05 * width;
    if lo + x0 > 0.0 {
        margin = margin.min(0.5 * (lo + x0 - SINGULAR_MARGIN));
    } else {
        margin = margin.min(0.5 * (-(hi + x0) - SINGULAR_MARGIN));
    }
    let span = (lo - margin, hi + margin);
    let anchor = fp.anchor.unwrap_or(lo).clamp(span.0, span.1);

    let numeric = |solute: usize, a: [f64; 2]| -> Result<Profile> {
        if a == [0.0, 0.0] {
            return Ok(Profile::Zero);
        }
        let pair = fundamental_system(fp.mode_coefficients(params, solute), anchor, span, DEFAULT_TOL)?;
        Ok(Profile::Numeric { pair, a })
    };
    let c1 = match mode {
        Family72Mode::Numeric => numeric(0, [fp.a11, fp.a12])?,
        Family72Mode::Bessel => {
            let bp = BesselCaseParams::new(params, &fp)?;
            Profile::Bessel(bessel_phi5(bp, fp.a11, fp.a12, variant))
        }
    };
    let c2 = numeric(1, [fp.a21, fp.a22])?;
    Ok(Family72 {
        params: *params,
        fp,
        mode,
        variant,
        profiles: [c1, c2],
    })
}

impl Family72 {
    /// φ₁ and its first two derivatives.
    fn phi1(&self, x: f64) -> [f64; 3] {
        let fp = &self.fp;
        let pr = &self.params;
        let (k, lam, u1) = (pr.k, pr.lambda_star, fp.u1);
        let y = x + fp.x0();
        let a = u1 * u1 * fp.rho1 / lam;
        let b = u1 * (2.0 + u1 * k * pr.rho_f0) / (6.0 * k * lam);
        let c = (k * fp.p1 - 2.0 * fp.u0) / (2.0 * k * lam);
        let ln = y.abs().ln();
        let log_term = if a == 0.0 { [0.0; 3] } else { [a * y * ln, a * (ln + 1.0), a / y] };
        [
            log_term[0] + b * y.powi(3) + c * y * y + fp.big_u1 * x + fp.big_u0,
            log_term[1] + 3.0 * b * y * y + 2.0 * c * y + fp.big_u1,
            log_term[2] + 6.0 * b * y + 2.0 * c,
        ]
    }

    pub fn jet_at(&self, t: f64, x: f64) -> Result<StateJet> {
        let fp = &self.fp;
        let pr = &self.params;
        let u1 = fp.u1;
        let y = x + fp.x0();
        let phi = self.phi1(x);
        let u = Jet {
            v: u1 * y * t + phi[0],
            t: u1 * y,
            x: u1 * t + phi[1],
            tt: 0.0,
            tx: u1,
            xx: phi[2],
        };
        let y2 = y * y;
        let rho = jet_x([
            pr.rho_f0 + fp.rho1 / y2,
            -2.0 * fp.rho1 / (y2 * y),
            6.0 * fp.rho1 / (y2 * y2),
        ]);
        let theta = jet_x([
            1.0 - fp.theta1 / y2,
            2.0 * fp.theta1 / (y2 * y),
            -6.0 * fp.theta1 / (y2 * y2),
        ]);
        let p0 = &fp.p0;
        let pressure = jet_x([u1 * x * x / pr.k + fp.p1 * x, 2.0 * u1 * x / pr.k + fp.p1, 2.0 * u1 / pr.k])
            .add(jet_t([p0.value(t), p0.derivative(t, 1), p0.derivative(t, 2)]));
        let c1 = decay(fp.v1, t).mul(jet_x(self.profiles[0].eval(x)?));
        let c2 = decay(fp.v2, t).mul(jet_x(self.profiles[1].eval(x)?));
        Ok(effective(u, rho, pressure, theta, c1, c2))
    }
}

impl FieldSolution for Family72 {
    fn domain(&self) -> Domain {
        Domain {
            t: (f64::NEG_INFINITY, f64::INFINITY),
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
        match self.mode {
            Family72Mode::Numeric => "family72 (numeric)".into(),
            Family72Mode::Bessel => format!("family72 (bessel, {})", self.variant),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::{max_of, max_residual};
    use super::*;

    fn params() -> ModelParams {
        ModelParams {
            k: 1.0,
            lambda_star: 2.0,
            rho_f0: 1.5,
            d1: 1.0,
            d2: 0.7,
            s1: 0.5,
            s2: 0.3,
            ..ModelParams::default()
        }
    }

    /// S₁ = 1/2 and u₀ = kp₁/2, with y = x + 2 on [0, 0.4].
    fn bessel_case(v1: f64) -> Family72Params {
        Family72Params {
            u0: 1.0,
            u1: 0.5,
            p1: 2.0,
            p0: ScalarFn::sine(0.3, 2.0),
            rho1: 0.2,
            theta1: 0.5,
            big_u0: 0.1,
            big_u1: -0.2,
            v1,
            v2: 0.4,
            a11: 1.0,
            a12: 0.5,
            a21: 0.3,
            a22: -1.0,
            x_range: (0.0, 0.4),
            anchor: None,
        }
    }

    #[test]
    fn branches_are_classified() {
        let pr = params();
        let branch = |v1| BesselCaseParams::new(&pr, &bessel_case(v1)).unwrap().branch;
        assert_eq!(branch(0.5), BesselBranch::EqualRates);
        assert_eq!(branch(1.5), BesselBranch::Oscillatory);
        assert_eq!(branch(0.1), BesselBranch::Modified);
        assert!(matches!(
            BesselCaseParams::new(&pr, &bessel_case(-0.5)),
            Err(Error::ComplexOrder { .. })
        ));
        let off = Family72Params { u0: 0.9, ..bessel_case(0.5) };
        assert!(BesselCaseParams::new(&pr, &off).is_err());
    }

    #[test]
    fn bessel_profiles_satisfy_the_operator() {
        let pr = params();
        for v1 in [0.5, 1.5, 0.1] {
            let bp = BesselCaseParams::new(&pr, &bessel_case(v1)).unwrap();
            let phi = bessel_phi5(bp, 1.0, 0.5, Variant::Corrected);
            let op = bp.operator();
            for x in [0.0, 0.13, 0.4] {
                let [f, d1, d2] = phi.eval(x).unwrap();
                let [a, b, c] = op(x);
                let scale = (a * d2).abs() + (b * d1).abs() + (c * f).abs();
                assert!((a * d2 + b * d1 + c * f).abs() <= 1e-10 * scale, "v1={v1} x={x}");
            }
        }
    }

    #[test]
    fn bessel_solutions_are_exact() {
        let pr = params();
        for v1 in [0.5, 1.5, 0.1] {
            let sol = family72_build(&pr, bessel_case(v1), Family72Mode::Bessel, Variant::Corrected).unwrap();
            let r = max_residual(&sol, &pr, (0.0, 1.0), (0.0, 0.4), 21);
            assert!(max_of(r) < 1e-8, "v1={v1}: {r:?}");
        }
    }

    #[test]
    fn printed_bessel_branch_misses_the_prefactor() {
        let pr = params();
        let sol = family72_build(&pr, bessel_case(1.5), Family72Mode::Bessel, Variant::AsPrinted).unwrap();
        let r = max_residual(&sol, &pr, (0.0, 1.0), (0.0, 0.4), 11);
        assert!(r[3] > 1e-3, "{r:?}");
        // On the equal-rates branch the printed form is already exact.
        let sol = family72_build(&pr, bessel_case(0.5), Family72Mode::Bessel, Variant::AsPrinted).unwrap();
        assert!(max_of(max_residual(&sol, &pr, (0.0, 1.0), (0.0, 0.4), 11)) < 1e-10);
    }

    #[test]
    fn numeric_modes_agree_with_bessel() {
        let pr = params();
        for v1 in [0.5, 1.5, 0.1] {
            let fp = bessel_case(v1);
            let bessel = family72_build(&pr, fp.clone(), Family72Mode::Bessel, Variant::Corrected).unwrap();
            let bp = BesselCaseParams::new(&pr, &fp).unwrap();
            let [f0, d0, _] = bessel_phi5(bp, fp.a11, fp.a12, Variant::Corrected).eval(0.0).unwrap();
            let numeric = family72_build(
                &pr,
                Family72Params { a11: f0, a12: d0, ..fp },
                Family72Mode::Numeric,
                Variant::Corrected,
            )
            .unwrap();
            for i in 0..=40 {
                let x = 0.01 * i as f64;
                let a = bessel.fields(0.3, x).c1;
                let b = numeric.fields(0.3, x).c1;
                assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0), "v1={v1} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn numeric_solution_is_exact_off_the_bessel_case() {
        let pr = ModelParams { s1: 0.8, ..params() };
        let fp = Family72Params {
            u0: -0.6,
            u1: -0.4,
            v1: 0.9,
            ..bessel_case(0.0)
        };
        let sol = family72_build(&pr, fp, Family72Mode::Numeric, Variant::Corrected).unwrap();
        let r = max_residual(&sol, &pr, (0.0, 1.0), (0.0, 0.4), 21);
        assert!(max_of(r) < 1e-8, "{r:?}");
    }

    #[test]
    fn singular_point_in_range_rejected() {
        let fp = Family72Params {
            u0: -0.1,
            u1: 1.0,
            ..bessel_case(0.5)
        };
        let err = family72_build(&params(), fp, Family72Mode::Numeric, Variant::Corrected);
        assert!(matches!(err, Err(Error::Domain { .. })));
    }
}
