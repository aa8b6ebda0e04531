//! Payloads and runners of the scenario tasks.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::discrepancy::{
    bessel_prefactor, shrinking_layer, taylor_record, time_reduction, wave_density_slope,
};
use super::{field_table, identity_check, residual_table, shared, Run, Table, Task};
use crate::families::{
    example2_with, family68_build, family72_build, family75_build, family78_build, DensitySlope, Family68Params,
    Family72Mode, Family72Params, Family75Params, Family78Params, Fig4Params,
};
use crate::field::{ConstantSolution, FieldSolution, Fields, HydrostaticView};
use crate::solver::{
    convergence_order, exact_convergence, manufactured_case, required_steps, residual_refinement,
    residual_scan_with, solve_ibvp, Bc, BoundaryConditions, DerivativeSource, Grid, SolveOptions, TimeFn,
    EQUATION_NAMES,
};
use crate::steady::{
    displacement_linear, displacement_quadrature, displacement_taylor, example1_scenario, steady_profiles,
    steady_solution, SteadyParams, Tissue,
};
use crate::symmetry::{classification_matrix, orbit_residual_test, GeneratorTag, SymmetryGenerator};
use crate::{Error, ModelParams, PressureKind, Result, ScalarFn, Variant};

const FIELD_NAMES: [&str; 6] = ["u", "rho", "p_star", "theta_f", "c1", "c2"];

fn default_steps() -> Vec<f64> {
    vec![1e-2, 5e-3, 2.5e-3]
}

/// Which solution a task works on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Family68 {
        #[serde(default)]
        params: Family68Params,
        #[serde(default = "corrected")]
        variant: Variant,
    },
    Family72 {
        #[serde(default)]
        params: Family72Params,
        #[serde(default = "numeric")]
        mode: Family72Mode,
        #[serde(default = "corrected")]
        variant: Variant,
    },
    Family75 {
        #[serde(default)]
        params: Family75Params,
    },
    Family78 {
        #[serde(default)]
        params: Family78Params,
    },
    /// The shrinking layer; replaces the scenario's model parameters.
    Example2 {
        #[serde(default)]
        fig: Fig4Params,
        #[serde(default = "corrected")]
        variant: Variant,
    },
    Steady {
        #[serde(default)]
        steady: SteadyParams,
        #[serde(default = "one")]
        rho: f64,
        #[serde(default = "half")]
        theta_f: f64,
        #[serde(default = "unit_range")]
        x_range: (f64, f64),
    },
    /// Constant state (u, ρ, p*, θ_F, c₁, c₂).
    Constant { values: [f64; 6] },
}

fn corrected() -> Variant {
    Variant::Corrected
}
fn numeric() -> Family72Mode {
    Family72Mode::Numeric
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn unit_range() -> (f64, f64) {
    (0.0, 1.0)
}

impl FamilySpec {
    pub fn label(&self) -> &'static str {
        match self {
            FamilySpec::Family68 { .. } => "family68",
            FamilySpec::Family72 { .. } => "family72",
            FamilySpec::Family75 { .. } => "family75",
            FamilySpec::Family78 { .. } => "family78",
            FamilySpec::Example2 { .. } => "example2",
            FamilySpec::Steady { .. } => "steady",
            FamilySpec::Constant { .. } => "constant",
        }
    }

    /// The solution and the model parameters it satisfies.
    pub fn build(&self, params: &ModelParams) -> Result<(Arc<dyn FieldSolution>, ModelParams)> {
        Ok(match self {
            FamilySpec::Family68 { params: fp, variant } => {
                (shared(family68_build(params, fp.clone(), *variant)?), *params)
            }
            FamilySpec::Family72 { params: fp, mode, variant } => {
                (shared(family72_build(params, fp.clone(), *mode, *variant)?), *params)
            }
            FamilySpec::Family75 { params: fp } => (shared(family75_build(params, fp.clone())?), *params),
            FamilySpec::Family78 { params: fp } => (shared(family78_build(params, fp.clone())?), *params),
            FamilySpec::Example2 { fig, variant } => {
                let (sol, _, p) = example2_with(*fig, *variant)?;
                (shared(sol), p)
            }
            FamilySpec::Steady {
                steady,
                rho,
                theta_f,
                x_range,
            } => (shared(steady_solution(params, steady, *rho, *theta_f, *x_range)?), *params),
            FamilySpec::Constant { values } => (
                shared(ConstantSolution {
                    kind: PressureKind::Effective,
                    values: Fields::from_array(*values),
                }),
                *params,
            ),
        })
    }

    /// Discrepancy record for a printed form that is known to fail.
    fn printed_record(&self) -> Result<Option<super::DiscrepancyRecord>> {
        Ok(match self {
            FamilySpec::Family68 {
                variant: Variant::AsPrinted,
                ..
            } => Some(time_reduction()?),
            FamilySpec::Family72 {
                mode: Family72Mode::Bessel,
                variant: Variant::AsPrinted,
                ..
            } => Some(bessel_prefactor()?),
            FamilySpec::Family78 { params } if params.density_slope == DensitySlope::PrintedRate => {
                Some(wave_density_slope()?)
            }
            FamilySpec::Example2 {
                variant: Variant::AsPrinted,
                ..
            } => Some(shrinking_layer()?),
            _ => None,
        })
    }
}

/// Steady profiles and displacement over a κ sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SteadyTask {
    pub steady: SteadyParams,
    /// κ values to sweep; empty means the scenario's κ only.
    pub kappas: Vec<f64>,
    pub x_range: (f64, f64),
    pub nx: usize,
    /// Where the Taylor κ-order is measured; defaults to the right end.
    pub taylor_x: Option<f64>,
}

impl Default for SteadyTask {
    fn default() -> Self {
        SteadyTask {
            steady: SteadyParams::default(),
            kappas: Vec::new(),
            x_range: (0.0, 1.0),
            nx: 101,
            taylor_x: None,
        }
    }
}

/// Fields and pointwise residuals of one solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyTask {
    pub family: FamilySpec,
    pub grid: Grid,
    #[serde(default = "analytic")]
    pub source: DerivativeSource,
    /// Required bound on the max residual, if any.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn analytic() -> DerivativeSource {
    DerivativeSource::Analytic
}

/// Analytic and refined finite-difference residual norms, plus random-jet
/// identities when `random_jets > 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTask {
    pub family: FamilySpec,
    pub grid: Grid,
    #[serde(default = "default_steps")]
    pub steps: Vec<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_min_order")]
    pub min_order: Option<f64>,
    #[serde(default)]
    pub random_jets: usize,
}

fn default_min_order() -> Option<f64> {
    Some(1.8)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcSpec {
    pub kind: BcKind,
    pub value: ScalarFn,
}

impl BcSpec {
    fn build(&self) -> Bc {
        let f = TimeFn::from(self.value.clone());
        match self.kind {
            BcKind::Dirichlet => Bc::Dirichlet(f),
            BcKind::Neumann => Bc::Neumann(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundarySpec {
    /// Dirichlet data for every field taken from the initial solution.
    Exact,
    Explicit {
        u: [BcSpec; 2],
        p_star: [BcSpec; 2],
        c1: [BcSpec; 2],
        c2: [BcSpec; 2],
        #[serde(default)]
        rho: [Option<ScalarFn>; 2],
        #[serde(default)]
        theta_f: [Option<ScalarFn>; 2],
    },
}

impl BoundarySpec {
    fn build(&self, sol: &Arc<dyn FieldSolution>, x: (f64, f64)) -> BoundaryConditions {
        match self {
            BoundarySpec::Exact => BoundaryConditions::from_solution(Arc::clone(sol), x.0, x.1),
            BoundarySpec::Explicit {
                u,
                p_star,
                c1,
                c2,
                rho,
                theta_f,
            } => {
                let pair = |b: &[BcSpec; 2]| [b[0].build(), b[1].build()];
                let inflow = |f: &[Option<ScalarFn>; 2]| [f[0].clone().map(TimeFn::from), f[1].clone().map(TimeFn::from)];
                BoundaryConditions {
                    u: pair(u),
                    p_star: pair(p_star),
                    c1: pair(c1),
                    c2: pair(c2),
                    rho: inflow(rho),
                    theta_f: inflow(theta_f),
                }
            }
        }
    }
}

/// Solver grid; `nt` defaults to the smallest stable step count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveGrid {
    pub x: (f64, f64),
    pub nx: usize,
    pub t: (f64, f64),
    #[serde(default)]
    pub nt: Option<usize>,
}

/// IBVP solve from the state of `family` at the initial time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTask {
    pub family: FamilySpec,
    pub grid: SolveGrid,
    #[serde(default = "exact_boundary")]
    pub boundary: BoundarySpec,
    #[serde(default = "default_snapshots")]
    pub snapshots: usize,
    /// Compare the final level with the family (meaningful with exact data).
    #[serde(default)]
    pub compare_exact: bool,
    /// Bound on the final max error per field, checked when comparing.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn exact_boundary() -> BoundarySpec {
    BoundarySpec::Exact
}
fn default_snapshots() -> usize {
    20
}

/// The symmetry classification matrix, optionally with orbits of one
/// solution under the scenario's parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OrbitTask {
    pub epsilon: f64,
    pub source: DerivativeSource,
    pub family: Option<FamilySpec>,
    pub grid: Option<Grid>,
}

impl Default for OrbitTask {
    fn default() -> Self {
        OrbitTask {
            epsilon: 0.1,
            source: DerivativeSource::Analytic,
            family: None,
            grid: None,
        }
    }
}

/// Displacement curves of the interstitium/dialysate layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Example1Task {
    pub kappas: Vec<f64>,
    pub lambda_stars: Vec<f64>,
    pub nx: usize,
}

impl Default for Example1Task {
    fn default() -> Self {
        Example1Task {
            kappas: vec![-50.0, 0.0, 50.0, 100.0],
            lambda_stars: vec![100.0, 700.0],
            nx: 101,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantChoice {
    AsPrinted,
    Corrected,
    Both,
}

impl VariantChoice {
    fn variants(self) -> Vec<Variant> {
        match self {
            VariantChoice::AsPrinted => vec![Variant::AsPrinted],
            VariantChoice::Corrected => vec![Variant::Corrected],
            VariantChoice::Both => vec![Variant::AsPrinted, Variant::Corrected],
        }
    }
}

/// Surfaces and residuals of the shrinking layer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Example2Task {
    pub fig: Fig4Params,
    pub variant: VariantChoice,
    pub nx: usize,
    pub nt: usize,
    pub t_end: f64,
}

impl Default for Example2Task {
    fn default() -> Self {
        Example2Task {
            fig: Fig4Params::default(),
            variant: VariantChoice::Both,
            nx: 101,
            nt: 100,
            t_end: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ConvergeMethod {
    /// Solver error against an exact solution under grid refinement; the
    /// built-in manufactured problem when no family is given.
    Solver {
        #[serde(default)]
        family: Option<FamilySpec>,
        #[serde(default = "unit_range")]
        x_range: (f64, f64),
        #[serde(default = "default_nxs")]
        nxs: Vec<usize>,
        #[serde(default = "default_t_end")]
        t_end: f64,
    },
    /// Finite-difference residual norms of an exact solution as h halves.
    FdResidual {
        family: FamilySpec,
        grid: Grid,
        #[serde(default = "default_steps")]
        steps: Vec<f64>,
    },
}

fn default_nxs() -> Vec<usize> {
    vec![51, 101, 201]
}
fn default_t_end() -> f64 {
    0.2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergeTask {
    #[serde(flatten)]
    pub method: ConvergeMethod,
    #[serde(default = "default_order_range")]
    pub order_range: (f64, f64),
    /// Errors below this are roundoff and carry no order.
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_order_range() -> (f64, f64) {
    (1.8, 2.2)
}
fn default_floor() -> f64 {
    1e-10
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_steps(steps: &[f64]) -> Result<()> {
    if steps.len() < 3 || steps.iter().any(|&h| !(h > 0.0)) || steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(config("steps: need at least three positive, strictly decreasing values"));
    }
    Ok(())
}

fn check_range(name: &str, r: (f64, f64)) -> Result<()> {
    if !(r.0.is_finite() && r.1.is_finite() && r.0 < r.1) {
        return Err(config(format!("{name}: need finite lo < hi, got {r:?}")));
    }
    Ok(())
}

pub(super) fn validate(task: &Task) -> Result<()> {
    match task {
        Task::Steady(s) => {
            check_range("x_range", s.x_range)?;
            if s.nx < 2 {
                return Err(config("nx: need at least 2 nodes"));
            }
            if s.kappas.iter().any(|k| !k.is_finite()) {
                return Err(config("kappas: must be finite"));
            }
        }
        Task::Family(f) => {
            f.grid.validated()?;
        }
        Task::Residual(r) => {
            r.grid.validated()?;
            check_steps(&r.steps)?;
        }
        Task::Solve(s) => {
            check_range("grid.x", s.grid.x)?;
            check_range("grid.t", s.grid.t)?;
            if s.grid.nx < 3 {
                return Err(config("grid.nx: need at least 3 nodes"));
            }
            if s.grid.nt == Some(0) || s.snapshots == 0 {
                return Err(config("grid.nt and snapshots must be positive"));
            }
        }
        Task::Orbit(o) => {
            if !o.epsilon.is_finite() {
                return Err(config("epsilon: must be finite"));
            }
            if o.family.is_some() != o.grid.is_some() {
                return Err(config("orbit: family and grid go together"));
            }
            if let Some(g) = o.grid {
                g.validated()?;
            }
        }
        Task::Example1(e) => {
            if e.nx < 2 || e.kappas.is_empty() || e.lambda_stars.iter().any(|&l| !(l > 0.0)) {
                return Err(config("example1: need nx >= 2, some kappas and positive lambda_stars"));
            }
        }
        Task::Example2(e) => {
            if e.nx < 2 || e.nt < 1 || !(e.t_end > 0.0) {
                return Err(config("example2: need nx >= 2, nt >= 1, t_end > 0"));
            }
        }
        Task::Converge(c) => {
            if !(c.order_range.0 <= c.order_range.1) {
                return Err(config("order_range: need lo <= hi"));
            }
            match &c.method {
                ConvergeMethod::Solver { x_range, nxs, t_end, .. } => {
                    check_range("x_range", *x_range)?;
                    if nxs.len() < 2 || nxs.iter().any(|&n| n < 3) || nxs.windows(2).any(|w| w[1] <= w[0]) {
                        return Err(config("nxs: need at least two increasing values >= 3"));
                    }
                    if !(*t_end > 0.0) {
                        return Err(config("t_end: must be positive"));
                    }
                }
                ConvergeMethod::FdResidual { grid, steps, .. } => {
                    grid.validated()?;
                    check_steps(steps)?;
                }
            }
        }
    }
    Ok(())
}

pub(super) fn execute(task: &Task, params: &ModelParams, run: &mut Run) -> Result<()> {
    match task {
        Task::Steady(s) => steady(s, params, run),
        Task::Family(f) => family(f, params, run),
        Task::Residual(r) => residual(r, params, run),
        Task::Solve(s) => solve(s, params, run),
        Task::Orbit(o) => orbit(o, params, run),
        Task::Example1(e) => example1(e, run),
        Task::Example2(e) => example2(e, run),
        Task::Converge(c) => converge(c, params, run),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

/// Displacement columns U_linear, U_taylor_printed, U_taylor_corrected,
/// U_quadrature, X_initial at x. Failures become NaN.
fn displacement_row(params: &ModelParams, sp: &SteadyParams, x: f64) -> Result<[f64; 5]> {
    let linear = displacement_linear(&ModelParams { kappa: 0.0, ..*params }, sp)?(x);
    let printed = displacement_taylor(params, sp, x, Variant::AsPrinted).unwrap_or(f64::NAN);
    let corrected = displacement_taylor(params, sp, x, Variant::Corrected).unwrap_or(f64::NAN);
    let quad = displacement_quadrature(params, sp, x, 1e-12).unwrap_or(f64::NAN);
    Ok([linear, printed, corrected, quad, x - printed])
}

const DISPLACEMENT_COLUMNS: [&str; 5] = ["U_linear", "U_taylor_printed", "U_taylor_corrected", "U_quadrature", "X_initial"];

fn steady(task: &SteadyTask, params: &ModelParams, run: &mut Run) -> Result<()> {
    let kappas = if task.kappas.is_empty() {
        vec![params.kappa]
    } else {
        task.kappas.clone()
    };
    let mut header = vec!["kappa", "x", "c1", "c2", "p_star", "p", "G"];
    header.extend(DISPLACEMENT_COLUMNS);
    let mut table = Table::new(&header);
    for &kappa in &kappas {
        let p = ModelParams { kappa, ..*params };
        let prof = steady_profiles(&p, &task.steady)?;
        for x in linspace(task.x_range.0, task.x_range.1, task.nx) {
            let mut row = vec![kappa, x, prof.c1(x), prof.c2(x), prof.pstar(x), prof.p(x), prof.g(x)];
            row.extend(displacement_row(&p, &task.steady, x)?);
            table.push_nums(&row);
        }
    }
    run.emit("steady.csv", &table)?;

    let mut positive: Vec<f64> = kappas.into_iter().filter(|&k| k > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    positive.dedup();
    if positive.len() >= 3 {
        let x = task.taylor_x.unwrap_or(task.x_range.1);
        run.record(taylor_record(params, &task.steady, x, &positive)?);
    }
    Ok(())
}

fn max_residual_check(run: &mut Run, label: &str, linf: [f64; 6], tolerance: Option<f64>) {
    if let Some(tol) = tolerance {
        let m = linf.iter().cloned().fold(0.0, f64::max);
        run.check(format!("{label} max residual"), m, format!("<= {tol:e}"), m <= tol);
    }
}

fn family(task: &FamilyTask, params: &ModelParams, run: &mut Run) -> Result<()> {
    let (sol, p) = task.family.build(params)?;
    run.emit("fields.csv", &field_table(sol.as_ref(), &task.grid))?;
    run.emit("residuals.csv", &residual_table(sol.as_ref(), &task.grid, &p, task.source)?)?;
    let report = residual_scan_with(sol.as_ref(), &task.grid, &p, task.source, run.parallel)?;
    log::info!("{}", report.summary());
    max_residual_check(run, task.family.label(), report.linf, task.tolerance);
    if let Some(r) = task.family.printed_record()? {
        run.record(r);
    }
    Ok(())
}

/// Writes the refinement table and checks orders of equations whose
/// finest norm is above `floor`.
fn refinement(
    run: &mut Run,
    file: &str,
    sol: &dyn FieldSolution,
    grid: &Grid,
    params: &ModelParams,
    steps: &[f64],
    range: (f64, f64),
    floor: f64,
) -> Result<()> {
    let (reports, finest) = residual_refinement(sol, grid, params, steps, run.parallel)?;
    let mut header = vec!["h".to_string()];
    header.extend(EQUATION_NAMES.iter().map(|n| format!("linf_{n}")));
    let mut table = Table::new(&header);
    for (h, r) in steps.iter().zip(&reports) {
        let mut row = vec![*h];
        row.extend_from_slice(&r.linf);
        table.push_nums(&row);
    }
    run.emit(file, &table)?;
    let orders = finest.orders.expect("refinement attaches orders");
    for k in 0..6 {
        if reports.iter().all(|r| r.linf[k] > floor) {
            let worst = orders[k].iter().cloned().fold(f64::INFINITY, f64::min);
            let best = orders[k].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ok = worst >= range.0 && best <= range.1;
            run.check(
                format!("fd residual order {}", EQUATION_NAMES[k]),
                worst,
                format!("all pairwise orders in [{}, {}]", range.0, range.1),
                ok,
            );
        }
    }
    Ok(())
}

fn residual(task: &ResidualTask, params: &ModelParams, run: &mut Run) -> Result<()> {
    let (sol, p) = task.family.build(params)?;
    let analytic = residual_scan_with(sol.as_ref(), &task.grid, &p, DerivativeSource::Analytic, run.parallel)?;
    log::info!("{}", analytic.summary());
    max_residual_check(run, task.family.label(), analytic.linf, task.tolerance);
    let mut norms = Table::new(&["equation", "linf", "rms", "t_at_max", "x_at_max"]);
    for k in 0..6 {
        norms.push(vec![
            EQUATION_NAMES[k].into(),
            analytic.linf[k].into(),
            analytic.l2[k].into(),
            analytic.argmax[k].0.into(),
            analytic.argmax[k].1.into(),
        ]);
    }
    run.emit("residual_norms.csv", &norms)?;
    if let Some(min) = task.min_order {
        refinement(run, "residual_refinement.csv", sol.as_ref(), &task.grid, &p, &task.steps, (min, f64::INFINITY), 1e-9)?;
    }
    if task.random_jets > 0 {
        let c = identity_check(task.random_jets, run.seed)?;
        run.check("p <-> p* round trip", c.round_trip, "<= 1e-12 relative", c.round_trip <= 1e-12);
        run.check("original vs starred residual", c.residual, "<= 1e-12 relative", c.residual <= 1e-12);
    }
    if let Some(r) = task.family.printed_record()? {
        run.record(r);
    }
    Ok(())
}

fn solve(task: &SolveTask, params: &ModelParams, run: &mut Run) -> Result<()> {
    let (sol, p) = task.family.build(params)?;
    let bc = task.boundary.build(&sol, task.grid.x);
    let probe = Grid::new(task.grid.x, task.grid.nx, task.grid.t, 1)?;
    let nt = match task.grid.nt {
        Some(nt) => nt,
        None => required_steps(&p, sol.as_ref(), &bc, &probe)?,
    };
    let grid = Grid { nt, ..probe };
    let out = solve_ibvp(&p, sol.as_ref(), &bc, &grid, SolveOptions { snapshots: task.snapshots })?;
    let mut table = Table::new(&["t", "x", "u", "rho", "p_star", "theta_f", "c1", "c2"]);
    for row in out.rows() {
        table.push_nums(&row);
    }
    run.emit("solution.csv", &table)?;
    if task.compare_exact {
        let err = out.final_error(sol.as_ref());
        let mut t = Table::new(&["field", "max_error"]);
        for k in 0..6 {
            t.push(vec![FIELD_NAMES[k].into(), err[k].into()]);
            if let Some(tol) = task.tolerance {
                run.check(format!("final error {}", FIELD_NAMES[k]), err[k], format!("<= {tol:e}"), err[k] <= tol);
            }
        }
        run.emit("error.csv", &t)?;
    }
    Ok(())
}

fn orbit_header() -> Vec<String> {
    let mut h: Vec<String> = ["row", "generator", "epsilon", "admitted", "original", "transformed"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend(EQUATION_NAMES.iter().map(|n| format!("delta_{n}")));
    h.push("pass".into());
    h
}

fn orbit_row(row: &str, r: &crate::symmetry::OrbitReport) -> Vec<super::Cell> {
    let mut cells = vec![
        row.into(),
        r.tag.to_string().into(),
        r.epsilon.into(),
        r.admitted.into(),
        r.original.into(),
        r.transformed.into(),
    ];
    cells.extend(r.delta.iter().map(|&d| d.into()));
    cells.push(r.pass.into());
    cells
}

fn orbit(task: &OrbitTask, params: &ModelParams, run: &mut Run) -> Result<()> {
    let rows = classification_matrix(task.epsilon, task.source)?;
    let mut table = Table::new(&orbit_header());
    for m in &rows {
        for r in &m.reports {
            table.push(orbit_row(&m.row.to_string(), r));
        }
        run.check(
            format!("classification row {}", m.row),
            m.reports.iter().filter(|r| r.pass).count() as f64,
            "admitted generators pass, the others fail",
            m.consistent(),
        );
    }
    run.emit("orbit_matrix.csv", &table)?;

    if let (Some(spec), Some(grid)) = (&task.family, &task.grid) {
        let (sol, p) = spec.build(params)?;
        let mut table = Table::new(&orbit_header());
        let mut consistent = true;
        for &tag in &GeneratorTag::ALL {
            let gen = match tag {
                GeneratorTag::X4 => SymmetryGenerator::x4(task.epsilon, ScalarFn::sine(1.0, 1.0)),
                _ => SymmetryGenerator::new(tag, task.epsilon),
            };
            let r = orbit_residual_test(Arc::clone(&sol), gen, grid, &p, task.source)?;
            if r.admitted && !r.pass {
                consistent = false;
            }
            table.push(orbit_row(spec.label(), &r));
        }
        run.check(
            format!("{} orbits", spec.label()),
            f64::from(consistent as u8),
            "every admitted generator passes",
            consistent,
        );
        run.emit("orbit_family.csv", &table)?;
    }
    Ok(())
}

/// Printed values of U(1) read from the healthy-tissue curves.
const EXAMPLE1_PRINTED: [(f64, f64); 3] = [(0.0, 0.135), (100.0, 0.161), (-50.0, 0.123)];

fn example1(task: &Example1Task, run: &mut Run) -> Result<()> {
    let (base, sp) = example1_scenario(Tissue::Healthy);
    let mut header = vec!["lambda_star", "kappa", "x"];
    header.extend(DISPLACEMENT_COLUMNS);
    let mut table = Table::new(&header);
    let mut at_one = Vec::new();
    for &lambda_star in &task.lambda_stars {
        for &kappa in &task.kappas {
            let p = ModelParams {
                lambda_star,
                kappa,
                ..base
            };
            for x in linspace(0.0, 1.0, task.nx) {
                let d = displacement_row(&p, &sp, x)?;
                let mut row = vec![lambda_star, kappa, x];
                row.extend(d);
                table.push_nums(&row);
            }
            at_one.push((lambda_star, kappa, displacement_row(&p, &sp, 1.0)?[1]));
        }
    }
    run.emit("example1.csv", &table)?;

    let lookup = |l: f64, k: f64| at_one.iter().find(|e| e.0 == l && e.1 == k).map(|e| e.2);
    for (kappa, printed) in EXAMPLE1_PRINTED {
        if let Some(u) = lookup(100.0, kappa) {
            let d = (u - printed).abs();
            run.check(
                format!("U(1), lambda*=100, kappa={kappa}"),
                u,
                format!("{printed} +- 1e-3"),
                d <= 1e-3,
            );
        }
    }
    if let (Some(a), Some(b)) = (lookup(700.0, 100.0), lookup(700.0, 0.0)) {
        let d = (a - b).abs();
        run.check("|U(1, kappa=100) - U(1, kappa=0)|, lambda*=700", d, "<= 1e-4", d <= 1e-4);
    }
    Ok(())
}

fn example2(task: &Example2Task, run: &mut Run) -> Result<()> {
    let fig = task.fig;
    let grid = Grid::new((0.0, fig.l), task.nx, (0.0, task.t_end), task.nt)?;
    let standard = fig == Fig4Params::default();
    if standard {
        run.check("p1", fig.p1(), "= -1", fig.p1() == -1.0);
        run.check("chi", fig.chi(), "= -4/3", (fig.chi() + 4.0 / 3.0).abs() <= 1e-15);
    }
    for variant in task.variant.variants() {
        let (sol, _, p) = example2_with(fig, variant)?;
        let sol = shared(sol);
        let hydro = HydrostaticView::new(Arc::clone(&sol), p)?;
        let mut surface = Table::new(&["t", "x", "u", "p", "c1"]);
        for j in 0..=grid.nt {
            let t = grid.t(j);
            for i in 0..grid.nx {
                let x = grid.x(i);
                let f = hydro.fields(t, x);
                surface.push_nums(&[t, x, f.u, f.pressure, f.c1]);
            }
        }
        run.emit(&format!("example2_{variant}_surface.csv"), &surface)?;
        run.emit(
            &format!("example2_{variant}_residuals.csv"),
            &residual_table(sol.as_ref(), &grid, &p, DerivativeSource::Analytic)?,
        )?;
        let report = residual_scan_with(sol.as_ref(), &grid, &p, DerivativeSource::Analytic, run.parallel)?;
        log::info!("{}", report.summary());
        match variant {
            Variant::AsPrinted => {
                if standard {
                    let u = sol.fields(1.0, fig.l).u;
                    run.check("as-printed u(1, L)", u, "= -0.2", (u + 0.2).abs() <= 1e-12);
                    let (r3, at) = (report.linf[2], report.argmax[2].1);
                    run.check(
                        "as-printed max |r3|",
                        r3,
                        "1.000 +- 1e-3 at x = 0",
                        (r3 - 1.0).abs() <= 1e-3 && at == 0.0,
                    );
                }
                run.record(shrinking_layer()?);
            }
            Variant::Corrected => {
                let m = report.max_linf();
                run.check("corrected max residual", m, "<= 1e-8", m <= 1e-8);
            }
        }
    }
    Ok(())
}

fn converge(task: &ConvergeTask, params: &ModelParams, run: &mut Run) -> Result<()> {
    match &task.method {
        ConvergeMethod::Solver {
            family,
            x_range,
            nxs,
            t_end,
        } => {
            let (p, exact) = match family {
                Some(spec) => {
                    let (sol, p) = spec.build(params)?;
                    (p, sol)
                }
                None => manufactured_case(),
            };
            let errs = exact_convergence(&p, exact, *x_range, nxs, *t_end)?;
            let mut header = vec!["h".to_string()];
            header.extend(FIELD_NAMES.iter().map(|n| format!("err_{n}")));
            let mut table = Table::new(&header);
            for (h, e) in &errs {
                let mut row = vec![*h];
                row.extend_from_slice(e);
                table.push_nums(&row);
            }
            run.emit("solver_convergence.csv", &table)?;
            let mut checked = 0;
            for k in 0..6 {
                let pairs: Vec<(f64, f64)> = errs.iter().map(|(h, e)| (*h, e[k])).collect();
                if pairs.iter().any(|p| p.1 <= task.floor) {
                    continue;
                }
                let orders = convergence_order(&pairs)?;
                let worst = orders.iter().cloned().fold(f64::INFINITY, f64::min);
                let ok = orders.iter().all(|o| (task.order_range.0..=task.order_range.1).contains(o));
                run.check(
                    format!("solver order {}", FIELD_NAMES[k]),
                    worst,
                    format!("all pairwise orders in [{}, {}]", task.order_range.0, task.order_range.1),
                    ok,
                );
                checked += 1;
            }
            if checked == 0 {
                run.check("solver order", f64::NAN, "some field above the roundoff floor", false);
            }
            Ok(())
        }
        ConvergeMethod::FdResidual { family, grid, steps } => {
            let (sol, p) = family.build(params)?;
            refinement(run, "fd_convergence.csv", sol.as_ref(), grid, &p, steps, task.order_range, task.floor)
        }
    }
}
