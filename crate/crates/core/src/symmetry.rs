//! Finite flows of the symmetry generators acting on solutions.
//!
//! ```text
//! X1 = ∂_t   X2 = ∂_x   X3 = ∂_u   X4 = g(t)∂_{p*}
//! X5 = c₁∂_{c₁}   X6 = c₂∂_{c₂}   X7 = x∂_u
//! ```
//!
//! X1–X4 are admitted for every parameter set, X5 iff γ₀ + γ₁ = σ₁, X6 iff
//! γ₂ = ασ₂ and X7 iff κ = 0. In the hydrostatic variables X4–X6 become
//! g(t)∂_p, c₁(∂_{c₁} + T₁∂_p) and c₂(∂_{c₂} + αT₂∂_p).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field::{Domain, FieldSolution, Fields};
use crate::model::{Jet, ModelParams, PressureKind, StateJet};
use crate::solver::{residual_scan, DerivativeSource, Grid, ResidualReport};
use crate::{Error, Result, ScalarFn};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorTag {
    X1,
    X2,
    X3,
    X4,
    X5,
    X6,
    X7,
}

impl GeneratorTag {
    pub const ALL: [GeneratorTag; 7] = [
        GeneratorTag::X1,
        GeneratorTag::X2,
        GeneratorTag::X3,
        GeneratorTag::X4,
        GeneratorTag::X5,
        GeneratorTag::X6,
        GeneratorTag::X7,
    ];

    pub fn operator(&self) -> &'static str {
        match self {
            GeneratorTag::X1 => "d/dt",
            GeneratorTag::X2 => "d/dx",
            GeneratorTag::X3 => "d/du",
            GeneratorTag::X4 => "g(t) d/dp*",
            GeneratorTag::X5 => "c1 d/dc1",
            GeneratorTag::X6 => "c2 d/dc2",
            GeneratorTag::X7 => "x d/du",
        }
    }
}

impl fmt::Display for GeneratorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A generator with its group parameter; `g` is required by X4 only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryGenerator {
    pub tag: GeneratorTag,
    pub epsilon: f64,
    #[serde(default)]
    pub g: Option<ScalarFn>,
}

impl SymmetryGenerator {
    pub fn new(tag: GeneratorTag, epsilon: f64) -> Self {
        SymmetryGenerator { tag, epsilon, g: None }
    }

    pub fn x4(epsilon: f64, g: ScalarFn) -> Self {
        SymmetryGenerator {
            tag: GeneratorTag::X4,
            epsilon,
            g: Some(g),
        }
    }

    fn check(&self) -> Result<()> {
        if !self.epsilon.is_finite() {
            return Err(Error::InvalidParam {
                field: "epsilon",
                reason: "must be finite".into(),
            });
        }
        if self.tag == GeneratorTag::X4 && self.g.is_none() {
            return Err(Error::InvalidParam {
                field: "g",
                reason: "X4 needs a function g(t)".into(),
            });
        }
        Ok(())
    }
}

/// Generators admitted by one parameter set and the classification row
/// (1–6) that yields them; `row` is `None` for the bare principal algebra and
/// for κ = 0 without either osmotic restriction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApplicabilitySet {
    pub tags: Vec<GeneratorTag>,
    pub row: Option<u8>,
}

impl ApplicabilitySet {
    pub fn contains(&self, tag: GeneratorTag) -> bool {
        self.tags.contains(&tag)
    }
}

pub fn applicable_generators(params: &ModelParams, tol: f64) -> ApplicabilitySet {
    let small = params.small_mismatch().abs()
        <= tol * (1.0 + params.gamma0.abs() + params.gamma1.abs() + params.sigma1.abs());
    let large = params.large_mismatch().abs() <= tol * (1.0 + params.gamma2.abs() + params.sigma2.abs());
    let linear = params.kappa == 0.0;
    let mut tags = vec![GeneratorTag::X1, GeneratorTag::X2, GeneratorTag::X3, GeneratorTag::X4];
    if small {
        tags.push(GeneratorTag::X5);
    }
    if large {
        tags.push(GeneratorTag::X6);
    }
    if linear {
        tags.push(GeneratorTag::X7);
    }
    let row = match (linear, small, large) {
        (false, true, false) => Some(1),
        (false, false, true) => Some(2),
        (false, true, true) => Some(3),
        (true, true, false) => Some(4),
        (true, false, true) => Some(5),
        (true, true, true) => Some(6),
        _ => None,
    };
    ApplicabilitySet { tags, row }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Variables {
    Effective,
    /// Hydrostatic p with the T₁, αT₂ couplings of the c-scalings.
    Hydrostatic { t1: f64, at2: f64 },
}

/// The image of a solution under a finite flow.
pub struct Transformed {
    inner: Arc<dyn FieldSolution>,
    gen: SymmetryGenerator,
    vars: Variables,
}

impl Transformed {
    pub fn generator(&self) -> &SymmetryGenerator {
        &self.gen
    }

    fn shift(&self) -> (f64, f64) {
        match self.gen.tag {
            GeneratorTag::X1 => (self.gen.epsilon, 0.0),
            GeneratorTag::X2 => (0.0, self.gen.epsilon),
            _ => (0.0, 0.0),
        }
    }

    fn g_jet(&self, t: f64) -> Jet {
        let g = self.gen.g.as_ref().expect("checked at construction");
        let e = self.gen.epsilon;
        Jet {
            v: e * g.value(t),
            t: e * g.derivative(t, 1),
            tt: e * g.derivative(t, 2),
            ..Jet::default()
        }
    }

    fn map_jet(&self, mut j: StateJet, t: f64, x: f64) -> StateJet {
        let e = self.gen.epsilon;
        match self.gen.tag {
            GeneratorTag::X1 | GeneratorTag::X2 => {}
            GeneratorTag::X3 => j.u.v += e,
            GeneratorTag::X4 => j.pressure = j.pressure.add(self.g_jet(t)),
            GeneratorTag::X5 | GeneratorTag::X6 => {
                let s = e.exp();
                let first = self.gen.tag == GeneratorTag::X5;
                let c = if first { j.c1 } else { j.c2 };
                if let Variables::Hydrostatic { t1, at2 } = self.vars {
                    let coupling = if first { t1 } else { at2 };
                    j.pressure = j.pressure.add(c.scale(coupling * (s - 1.0)));
                }
                if first {
                    j.c1 = c.scale(s);
                } else {
                    j.c2 = c.scale(s);
                }
            }
            GeneratorTag::X7 => {
                j.u.v += e * x;
                j.u.x += e;
            }
        }
        j
    }
}

impl FieldSolution for Transformed {
    fn pressure_kind(&self) -> PressureKind {
        self.inner.pressure_kind()
    }
    fn domain(&self) -> Domain {
        let (dt, dx) = self.shift();
        self.inner.domain().shifted(dt, dx)
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        let (dt, dx) = self.shift();
        let f = self.inner.fields(t - dt, x - dx);
        let j = StateJet::constant(self.inner.pressure_kind(), f.to_array());
        Fields::from(&self.map_jet(j, t, x))
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        let (dt, dx) = self.shift();
        let j = self.inner.jet(t - dt, x - dx)?;
        Some(self.map_jet(j, t, x))
    }
    fn label(&self) -> String {
        format!("{} . {}({})", self.inner.label(), self.gen.tag, self.gen.epsilon)
    }
}

/// Applies a generator to an effective-pressure solution. Generators not
/// admitted by `params` are refused unless `allow_inapplicable` is set.
pub fn apply_generator(
    sol: Arc<dyn FieldSolution>,
    gen: SymmetryGenerator,
    params: &ModelParams,
    allow_inapplicable: bool,
) -> Result<Transformed> {
    gen.check()?;
    if sol.pressure_kind() != PressureKind::Effective {
        return Err(Error::PressureKind {
            expected: PressureKind::Effective,
            found: sol.pressure_kind(),
        });
    }
    if !allow_inapplicable && !applicable_generators(params, crate::model::RESTRICTION_TOL).contains(gen.tag) {
        return Err(Error::NotApplicable { generator: gen.tag });
    }
    Ok(Transformed {
        inner: sol,
        gen,
        vars: Variables::Effective,
    })
}

/// The same flows on a hydrostatic-pressure solution: X4 shifts p, X5 and
/// X6 scale a concentration and shift p by T₁(e^ε−1)c₁ or αT₂(e^ε−1)c₂. The
/// other generators act as in the effective variables.
pub fn original_variable_flow(
    sol: Arc<dyn FieldSolution>,
    gen: SymmetryGenerator,
    params: &ModelParams,
) -> Result<Transformed> {
    gen.check()?;
    if sol.pressure_kind() != PressureKind::Hydrostatic {
        return Err(Error::PressureKind {
            expected: PressureKind::Hydrostatic,
            found: sol.pressure_kind(),
        });
    }
    Ok(Transformed {
        inner: sol,
        gen,
        vars: Variables::Hydrostatic {
            t1: params.t1(),
            at2: params.alpha * params.t2(),
        },
    })
}

/// Outcome of comparing a solution's residuals with those of its image.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub tag: GeneratorTag,
    pub epsilon: f64,
    pub admitted: bool,
    pub original: f64,
    pub transformed: f64,
    /// Per-equation change of the L∞ residual norm.
    pub delta: [f64; 6],
    pub pass: bool,
}

/// Pass iff max residual of the image ≤ 2 × (max residual of the original)
/// + 1e−9 on the same grid. Generators are applied even when not admitted,
/// so the report can certify failures.
pub fn orbit_residual_test(
    sol: Arc<dyn FieldSolution>,
    gen: SymmetryGenerator,
    grid: &Grid,
    params: &ModelParams,
    source: DerivativeSource,
) -> Result<OrbitReport> {
    let admitted = applicable_generators(params, crate::model::RESTRICTION_TOL).contains(gen.tag);
    let before = residual_scan(sol.as_ref(), grid, params, source)?;
    let image = apply_generator(sol, gen.clone(), params, true)?;
    let after = residual_scan(&image, grid, params, source)?;
    Ok(orbit_report(&gen, admitted, &before, &after))
}

fn orbit_report(gen: &SymmetryGenerator, admitted: bool, before: &ResidualReport, after: &ResidualReport) -> OrbitReport {
    let original = before.max_linf();
    let transformed = after.max_linf();
    let mut delta = [0.0; 6];
    for k in 0..6 {
        delta[k] = after.linf[k] - before.linf[k];
    }
    OrbitReport {
        tag: gen.tag,
        epsilon: gen.epsilon,
        admitted,
        original,
        transformed,
        delta,
        pass: transformed <= 2.0 * original + 1e-9,
    }
}

/// One row of the classification matrix: a parameter set realising the row,
/// and the orbit outcome for every generator.
#[derive(Clone, Debug, Serialize)]
pub struct MatrixRow {
    pub row: u8,
    pub params: ModelParams,
    pub reports: Vec<OrbitReport>,
}

impl MatrixRow {
    /// Every admitted generator passes and every other one fails.
    pub fn consistent(&self) -> bool {
        self.reports.iter().all(|r| r.admitted == r.pass)
    }
}

/// Parameters realising classification row 1–6.
pub fn row_params(row: u8) -> Result<ModelParams> {
    if !(1..=6).contains(&row) {
        return Err(Error::InvalidParam {
            field: "row",
            reason: format!("rows are 1..=6, got {row}"),
        });
    }
    let kappa = if row <= 3 { 20.0 } else { 0.0 };
    let small = matches!(row, 1 | 3 | 4 | 6);
    let large = matches!(row, 2 | 3 | 5 | 6);
    Ok(ModelParams {
        k: 1.0,
        lambda_star: 10.0,
        kappa,
        alpha: 0.4,
        rt: 2.0,
        sigma1: 0.3,
        sigma2: 0.5,
        gamma0: if small { 0.2 } else { 0.05 },
        gamma1: 0.1,
        gamma2: if large { 0.2 } else { 0.1 },
        ..ModelParams::default()
    })
}

/// Runs all seven generators on a steady solution with curved u and
/// non-uniform c₁, c₂ for each classification row, on a grid over [0, 1]
/// (so |ε| ≤ 0.5 keeps shifted images defined).
pub fn classification_matrix(epsilon: f64, source: DerivativeSource) -> Result<Vec<MatrixRow>> {
    let sp = crate::steady::SteadyParams {
        p0: 1.0,
        p1: 2.0,
        a01: 0.1,
        a1: 0.5,
        a02: 0.2,
        a2: 0.3,
        u1: 0.5,
        ..Default::default()
    };
    let grid = Grid::new((0.0, 1.0), 21, (0.0, 1.0), 4)?;
    (1..=6)
        .map(|row| {
            let params = row_params(row)?;
            let sol: Arc<dyn FieldSolution> =
                Arc::new(crate::steady::steady_solution(&params, &sp, 1.2, 0.7, (-0.5, 1.5))?);
            let reports = GeneratorTag::ALL
                .iter()
                .map(|&tag| {
                    let gen = match tag {
                        GeneratorTag::X4 => SymmetryGenerator::x4(epsilon, ScalarFn::sine(1.0, 1.0)),
                        _ => SymmetryGenerator::new(tag, epsilon),
                    };
                    orbit_residual_test(Arc::clone(&sol), gen, &grid, &params, source)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(MatrixRow { row, params, reports })
        })
        .collect()
}
