//! Steady states: with every time derivative dropped, the effective pressure
//! is affine, each concentration solves D C″ + k S P₁ C′ = 0, and the
//! displacement obeys
//!
//! ```text
//! λ* U′ + κ (U′)² = G(x) = U₁ + P₁x − (γ₀+γ₁−σ₁)RT C₁ − (γ₂−ασ₂)RT C₂
//! ```
//!
//! U is available as the κ = 0 closed form, as an exact quadrature of the
//! positive root, and as the first-order Taylor expansion in κ (printed and
//! sign-corrected).

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::field::{Domain, FieldSolution, Fields};
use crate::model::{Jet, ModelParams, PressureKind, StateJet};
use crate::specfun::{integrate_adaptive, root_bracketed, DEFAULT_TOL};
use crate::{Error, Result, Variant};

/// Shape of a steady concentration profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationBranch {
    /// C = A₀ + A e^{−kSP₁x/D}; needs S D P₁ ≠ 0.
    #[default]
    Exponential,
    /// C = A₀ + A x; the diffusion-only case S = 0.
    Affine,
    /// C = A₀; the convection-only case D = 0.
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteadyParams {
    pub p0: f64,
    pub p1: f64,
    pub a01: f64,
    pub a1: f64,
    pub a02: f64,
    pub a2: f64,
    pub u0: f64,
    pub u1: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub branches: [ConcentrationBranch; 2],
}

impl Default for SteadyParams {
    fn default() -> Self {
        SteadyParams {
            p0: 0.0,
            p1: 1.0,
            a01: 0.0,
            a1: 0.0,
            a02: 0.0,
            a2: 0.0,
            u0: 0.0,
            u1: 0.0,
            x0: 0.0,
            branches: [ConcentrationBranch::Exponential; 2],
        }
    }
}

/// Closed-form steady profiles for one parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyProfiles {
    pub params: ModelParams,
    pub sp: SteadyParams,
    /// Decay rates kSᵢP₁/Dᵢ of the exponential branches (0 otherwise).
    pub rates: [f64; 2],
}

pub fn steady_profiles(params: &ModelParams, sp: &SteadyParams) -> Result<SteadyProfiles> {
    params.validate()?;
    let mut rates = [0.0; 2];
    for i in 0..2 {
        let (s, d) = if i == 0 {
            (params.s1, params.d1)
        } else {
            (params.s2, params.d2)
        };
        match sp.branches[i] {
            ConcentrationBranch::Exponential => {
                if s * d * sp.p1 == 0.0 {
                    return Err(Error::Branch(format!(
                        "exponential profile for solute {} needs S·D·P₁ ≠ 0 (S={s}, D={d}, P₁={})",
                        i + 1,
                        sp.p1
                    )));
                }
                rates[i] = params.k * s * sp.p1 / d;
            }
            ConcentrationBranch::Affine if s != 0.0 && sp.p1 != 0.0 => {
                return Err(Error::Branch(format!(
                    "affine profile for solute {} needs S·P₁ = 0",
                    i + 1
                )));
            }
            ConcentrationBranch::Constant if d != 0.0 => {
                return Err(Error::Branch(format!(
                    "constant profile for solute {} needs D = 0",
                    i + 1
                )));
            }
            _ => {}
        }
    }
    Ok(SteadyProfiles {
        params: *params,
        sp: *sp,
        rates,
    })
}

impl SteadyProfiles {
    fn constants(&self, i: usize) -> (f64, f64) {
        if i == 0 {
            (self.sp.a01, self.sp.a1)
        } else {
            (self.sp.a02, self.sp.a2)
        }
    }

    /// Cᵢ and its first two derivatives, i ∈ {0, 1}.
    pub fn concentration(&self, i: usize, x: f64) -> [f64; 3] {
        let (a0, a) = self.constants(i);
        match self.sp.branches[i] {
            ConcentrationBranch::Exponential => {
                let r = self.rates[i];
                let e = a * (-r * x).exp();
                [a0 + e, -r * e, r * r * e]
            }
            ConcentrationBranch::Affine => [a0 + a * x, a, 0.0],
            ConcentrationBranch::Constant => [a0, 0.0, 0.0],
        }
    }

    /// ∫_{x0}^x Cᵢ.
    fn concentration_integral(&self, i: usize, x: f64) -> f64 {
        let (a0, a) = self.constants(i);
        let x0 = self.sp.x0;
        match self.sp.branches[i] {
            ConcentrationBranch::Exponential => {
                let r = self.rates[i];
                a0 * (x - x0) + a * ((-r * x0).exp() - (-r * x).exp()) / r
            }
            ConcentrationBranch::Affine => a0 * (x - x0) + 0.5 * a * (x * x - x0 * x0),
            ConcentrationBranch::Constant => a0 * (x - x0),
        }
    }

    pub fn c1(&self, x: f64) -> f64 {
        self.concentration(0, x)[0]
    }

    pub fn c2(&self, x: f64) -> f64 {
        self.concentration(1, x)[0]
    }

    pub fn pstar(&self, x: f64) -> f64 {
        self.sp.p0 + self.sp.p1 * x
    }

    /// Hydrostatic pressure P* + T₁C₁ + αT₂C₂.
    pub fn p(&self, x: f64) -> f64 {
        let pr = &self.params;
        self.pstar(x) + pr.t1() * self.c1(x) + pr.alpha * pr.t2() * self.c2(x)
    }

    pub fn g(&self, x: f64) -> f64 {
        let pr = &self.params;
        self.sp.u1 + self.sp.p1 * x
            - pr.small_mismatch() * pr.rt * self.c1(x)
            - pr.large_mismatch() * pr.rt * self.c2(x)
    }

    /// ∫_{x0}^x G.
    pub fn g_integral(&self, x: f64) -> f64 {
        let pr = &self.params;
        let x0 = self.sp.x0;
        self.sp.u1 * (x - x0) + 0.5 * self.sp.p1 * (x * x - x0 * x0)
            - pr.small_mismatch() * pr.rt * self.concentration_integral(0, x)
            - pr.large_mismatch() * pr.rt * self.concentration_integral(1, x)
    }

    /// Linear-stress displacement U₀ + (1/λ*)∫G, i.e. U₀ + (U₁/λ*)x + U₂x²
    /// + U₃e^{−r₁x} + U₄e^{−r₂x} with x0 = 0 and the A₀ᵢ contributions kept.
    pub fn u_linear(&self, x: f64) -> f64 {
        self.sp.u0 + self.g_integral(x) / self.params.lambda_star
    }
}

/// G(x) as a standalone evaluator.
pub fn g_function(params: &ModelParams, sp: &SteadyParams) -> Result<impl Fn(f64) -> f64> {
    let prof = steady_profiles(params, sp)?;
    Ok(move |x| prof.g(x))
}

/// The κ = 0 displacement. Exponential coefficients with vanishing
/// denominators are reported as branch errors.
pub fn displacement_linear(params: &ModelParams, sp: &SteadyParams) -> Result<impl Fn(f64) -> f64> {
    if params.kappa != 0.0 {
        warn!("displacement_linear ignores kappa = {}", params.kappa);
    }
    let prof = steady_profiles(params, sp)?;
    Ok(move |x| prof.u_linear(x))
}

fn radicand(prof: &SteadyProfiles, x: f64) -> f64 {
    let ls = prof.params.lambda_star;
    1.0 + 4.0 * prof.params.kappa * prof.g(x) / (ls * ls)
}

/// First ξ in [a, b] (scanning from a) where 1 + 4κG/λ*² < 0.
fn first_negative_radicand(prof: &SteadyProfiles, a: f64, b: f64) -> Option<f64> {
    const SAMPLES: usize = 1000;
    let f = |x: f64| radicand(prof, x);
    if f(a) < 0.0 {
        return Some(a);
    }
    let mut prev = a;
    for i in 1..=SAMPLES {
        let x = a + (b - a) * i as f64 / SAMPLES as f64;
        if f(x) < 0.0 {
            return Some(root_bracketed(f, prev, x, 1e-14).unwrap_or(x));
        }
        prev = x;
    }
    None
}

/// Exact displacement from the positive root of the quadratic in U′:
/// U = U₀ + (λ*/2κ)(−(x−x₀) + ∫√(1+4κG/λ*²)). The integrand is evaluated
/// as (2G/λ*)/(1+√(1+4κG/λ*²)), which is free of cancellation and reduces
/// to G/λ* at κ = 0.
pub fn displacement_quadrature(params: &ModelParams, sp: &SteadyParams, x: f64, tol: f64) -> Result<f64> {
    let prof = steady_profiles(params, sp)?;
    let x0 = sp.x0;
    let (a, b) = if x >= x0 { (x0, x) } else { (x, x0) };
    let scan = if x >= x0 {
        first_negative_radicand(&prof, a, b)
    } else {
        first_negative_radicand(&prof, b, a)
    };
    if let Some(at) = scan {
        return Err(Error::Domain {
            at,
            reason: "1 + 4κG/λ*² < 0: no real displacement gradient".into(),
        });
    }
    let ls = params.lambda_star;
    let integrand = |xi: f64| {
        let g = prof.g(xi);
        2.0 * g / ls / (1.0 + radicand(&prof, xi).max(0.0).sqrt())
    };
    Ok(sp.u0 + integrate_adaptive(integrand, x0, x, tol)?)
}

/// First-order Taylor displacement U₀ + (1/λ*)∫G ± (κ/λ*³)∫G²; the printed
/// form carries "+", the expansion of √(1+z) gives "−".
pub fn displacement_taylor(params: &ModelParams, sp: &SteadyParams, x: f64, variant: Variant) -> Result<f64> {
    let prof = steady_profiles(params, sp)?;
    let ls = params.lambda_star;
    let zmax = sample_max(|xi| (4.0 * params.kappa * prof.g(xi) / (ls * ls)).abs(), sp.x0, x);
    if zmax > 0.5 {
        debug!("Taylor displacement outside its small-parameter regime: |4κG/λ*²| reaches {zmax:.3}");
    }
    let i1 = prof.g_integral(x);
    let i2 = integrate_adaptive(|xi| prof.g(xi).powi(2), sp.x0, x, DEFAULT_TOL * 1e-2)?;
    let sign = match variant {
        Variant::AsPrinted => 1.0,
        Variant::Corrected => -1.0,
    };
    Ok(sp.u0 + i1 / ls + sign * params.kappa * i2 / (ls * ls * ls))
}

/// κ-order of the Taylor error: least-squares slope of log|U_quad − U_taylor|
/// against log κ at `x`, with the pairwise orders. κ values must be positive
/// and increasing.
pub fn taylor_kappa_order(
    params: &ModelParams,
    sp: &SteadyParams,
    x: f64,
    kappas: &[f64],
    variant: Variant,
) -> Result<(f64, Vec<f64>)> {
    if kappas.len() < 2 || kappas.iter().any(|&k| !(k > 0.0)) || kappas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParam {
            field: "kappas",
            reason: "need at least two positive, increasing values".into(),
        });
    }
    let mut pts = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let p = ModelParams { kappa, ..*params };
        let exact = displacement_quadrature(&p, sp, x, DEFAULT_TOL * 1e-2)?;
        let taylor = displacement_taylor(&p, sp, x, variant)?;
        pts.push((kappa.ln(), (exact - taylor).abs().ln()));
    }
    let pairwise = pts.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
    Ok((num / den, pairwise))
}

/// Steady parameters whose G is exactly `g0 + g1·x` (no solute coupling).
pub fn affine_g(g0: f64, g1: f64) -> SteadyParams {
    SteadyParams {
        p1: g1,
        u1: g0,
        ..SteadyParams::default()
    }
}

fn sample_max(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    (0..=100)
        .map(|i| f(a + (b - a) * i as f64 / 100.0))
        .fold(0.0, f64::max)
}

/// Present position x with x − U(x) = X, searched on `bracket`.
///
/// The map x ↦ x − U(x) must be strictly increasing on the bracket (checked on
/// a uniform sample), otherwise the inversion is ambiguous.
pub fn present_position(u: impl Fn(f64) -> f64, initial: f64, bracket: (f64, f64)) -> Result<f64> {
    const SAMPLES: usize = 400;
    let (lo, hi) = bracket;
    let phi = |x: f64| x - u(x);
    let mut prev = phi(lo);
    for i in 1..=SAMPLES {
        let x = lo + (hi - lo) * i as f64 / SAMPLES as f64;
        let v = phi(x);
        if !(v > prev) {
            return Err(Error::Inversion(format!(
                "x − U(x) is not strictly increasing near x = {x}"
            )));
        }
        prev = v;
    }
    root_bracketed(|x| phi(x) - initial, lo, hi, 1e-12).map_err(|e| match e {
        Error::Bracket { lo, hi } => {
            Error::Inversion(format!("initial position {initial} not reached on [{lo}, {hi}]"))
        }
        other => other,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tissue {
    /// λ* = 100.
    Healthy,
    /// λ* = 700.
    Tumour,
}

/// Gas constant times body temperature, mmHg per mmol/L (R = 62.364
/// L·mmHg/(mol·K), T = 310 K).
pub const RT_BODY: f64 = 19.33;

/// Interstitium/dialysate layer of unit width: p = −1 → 40 mmHg,
/// c₁ = 6 → 170 mmol/L, c₂ = 0.4 → 0 mmol/L, σ₁ = 0.0035, σ₂ = 0, α = 0.4,
/// with the osmotic restrictions imposed and the stress closure U₁ = P₀.
///
/// k, Sᵢ and Dᵢ only shape the concentration profiles, which do not enter
/// the displacement under the restrictions; they are placeholders
/// (k = 0.1, Sᵢ = 0.5, Dᵢ = 1). κ is left at 0.
pub fn example1_scenario(tissue: Tissue) -> (ModelParams, SteadyParams) {
    let sigma1 = 0.0035;
    let params = ModelParams {
        k: 0.1,
        lambda_star: match tissue {
            Tissue::Healthy => 100.0,
            Tissue::Tumour => 700.0,
        },
        kappa: 0.0,
        alpha: 0.4,
        rt: RT_BODY,
        sigma1,
        sigma2: 0.0,
        s1: 0.5,
        s2: 0.5,
        d1: 1.0,
        d2: 1.0,
        gamma0: sigma1,
        gamma1: 0.0,
        gamma2: 0.0,
        rho_f0: 1.0,
    };
    let (p_in, p_out) = (-1.0, 40.0);
    let (c1_in, c1_out) = (6.0, 170.0);
    let (c2_in, c2_out) = (0.4, 0.0);
    let pstar = |p: f64, c1: f64, c2: f64| p - params.t1() * c1 - params.alpha * params.t2() * c2;
    let p0 = pstar(p_in, c1_in, c2_in);
    let p1 = pstar(p_out, c1_out, c2_out) - p0;
    let fit = |c_in: f64, c_out: f64, s: f64, d: f64| {
        let decay = (-params.k * s * p1 / d).exp();
        let a = (c_in - c_out) / (1.0 - decay);
        (c_in - a, a)
    };
    let (a01, a1) = fit(c1_in, c1_out, params.s1, params.d1);
    let (a02, a2) = fit(c2_in, c2_out, params.s2, params.d2);
    let sp = SteadyParams {
        p0,
        p1,
        a01,
        a1,
        a02,
        a2,
        u0: 0.0,
        u1: p0,
        x0: 0.0,
        branches: [ConcentrationBranch::Exponential; 2],
    };
    (params, sp)
}

/// A steady state as a [`FieldSolution`] with constant ρ and θ_F. The
/// displacement gradient is the positive root, so the jet is exact for any κ
/// while 1 + 4κG/λ*² stays positive on `x_range`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadySolution {
    pub profiles: SteadyProfiles,
    pub rho: f64,
    pub theta_f: f64,
    pub x_range: (f64, f64),
}

pub fn steady_solution(
    params: &ModelParams,
    sp: &SteadyParams,
    rho: f64,
    theta_f: f64,
    x_range: (f64, f64),
) -> Result<SteadySolution> {
    let profiles = steady_profiles(params, sp)?;
    if let Some(at) = first_negative_radicand(&profiles, x_range.0, x_range.1) {
        return Err(Error::Domain {
            at,
            reason: "1 + 4κG/λ*² < 0: no real displacement gradient".into(),
        });
    }
    Ok(SteadySolution {
        profiles,
        rho,
        theta_f,
        x_range,
    })
}

impl SteadySolution {
    fn displacement(&self, x: f64) -> f64 {
        let pr = &self.profiles.params;
        if pr.kappa == 0.0 {
            self.profiles.u_linear(x)
        } else {
            displacement_quadrature(pr, &self.profiles.sp, x, DEFAULT_TOL).unwrap_or(f64::NAN)
        }
    }
}

impl FieldSolution for SteadySolution {
    fn domain(&self) -> Domain {
        Domain {
            t: (f64::NEG_INFINITY, f64::INFINITY),
            x: self.x_range,
        }
    }
    fn fields(&self, _t: f64, x: f64) -> Fields {
        let p = &self.profiles;
        Fields {
            u: self.displacement(x),
            rho: self.rho,
            pressure: p.pstar(x),
            theta_f: self.theta_f,
            c1: p.c1(x),
            c2: p.c2(x),
        }
    }
    fn jet(&self, _t: f64, x: f64) -> Option<StateJet> {
        let p = &self.profiles;
        let pr = &p.params;
        let ls = pr.lambda_star;
        let root = radicand(p, x);
        if !(root >= 0.0) {
            return None;
        }
        let root = root.sqrt();
        let c1 = p.concentration(0, x);
        let c2 = p.concentration(1, x);
        let g = p.g(x);
        let gx = p.sp.p1 - pr.small_mismatch() * pr.rt * c1[1] - pr.large_mismatch() * pr.rt * c2[1];
        let ux = 2.0 * g / ls / (1.0 + root);
        let u = Jet {
            v: self.displacement(x),
            x: ux,
            xx: gx / (ls * root),
            ..Jet::default()
        };
        let spatial = |c: [f64; 3]| Jet {
            v: c[0],
            x: c[1],
            xx: c[2],
            ..Jet::default()
        };
        Some(StateJet {
            pressure_kind: PressureKind::Effective,
            u,
            rho: Jet::constant(self.rho),
            pressure: spatial([p.pstar(x), p.sp.p1, 0.0]),
            theta_f: Jet::constant(self.theta_f),
            c1: spatial(c1),
            c2: spatial(c2),
        })
    }
    fn label(&self) -> String {
        "steady".into()
    }
}
