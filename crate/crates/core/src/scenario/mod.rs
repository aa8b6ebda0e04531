//! Declarative scenarios: one JSON document selects a task, its payload and
//! the model parameters; a run writes CSV tables, a discrepancy report and a
//! summary under `<out_dir>/<name>/`.
//!
//! ```json
//! {
//!   "version": 1,
//!   "name": "shrinking-layer",
//!   "seed": 0,
//!   "params": { "k": 2.0, "lambda_star": 1.0 },
//!   "task": "example2",
//!   "payload": { "variant": "both" }
//! }
//! ```
//!
//! Missing `params` entries take their defaults; `payload` fields documented
//! on each task type. Exit status: 0 on success, 1 on a configuration, I/O or
//! computation error, 2 when a check inside the scenario fails.

mod discrepancy;
mod table;
mod tasks;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use discrepancy::{
    all_records, bessel_prefactor, discrepancy_report, shrinking_layer, taylor_record, taylor_sign,
    time_reduction, wave_density_slope, x_reduction_convection, x_reduction_second_rate, DiscrepancyRecord,
    Evidence,
};
pub use table::{emit_csv, format_number, write_atomic, Cell, Table};
pub use tasks::{
    BcKind, BcSpec, BoundarySpec, ConvergeMethod, ConvergeTask, Example1Task, Example2Task, FamilySpec, FamilyTask,
    OrbitTask, ResidualTask, SolveGrid, SolveTask, SteadyTask, VariantChoice,
};

use crate::field::FieldSolution;
use crate::model::{from_effective, residual_original, residual_starred, to_effective, Jet, PressureKind, StateJet};
use crate::{Error, ModelParams, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    /// Output subdirectory; letters, digits, '-', '_' and '.' only.
    pub name: String,
    #[serde(default)]
    pub params: ModelParams,
    /// Seed for every randomised check in the run.
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub task: Task,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", content = "payload", rename_all = "snake_case")]
pub enum Task {
    Steady(SteadyTask),
    Family(FamilyTask),
    Residual(ResidualTask),
    Solve(SolveTask),
    Orbit(OrbitTask),
    Example1(Example1Task),
    Example2(Example2Task),
    Converge(ConvergeTask),
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Steady(_) => "steady",
            Task::Family(_) => "family",
            Task::Residual(_) => "residual",
            Task::Solve(_) => "solve",
            Task::Orbit(_) => "orbit",
            Task::Example1(_) => "example1",
            Task::Example2(_) => "example2",
            Task::Converge(_) => "converge",
        }
    }

    pub const NAMES: [&'static str; 8] =
        ["steady", "family", "residual", "solve", "orbit", "example1", "example2", "converge"];
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks everything that can be checked without computing.
    pub fn validate(&self) -> Result<()> {
        if self.version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.version
            )));
        }
        let safe = |c: char| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.');
        if self.name.is_empty() || self.name.starts_with('.') || !self.name.chars().all(safe) {
            return Err(Error::Config(format!(
                "scenario name {:?} must be non-empty, not start with '.', and use only [A-Za-z0-9_.-]",
                self.name
            )));
        }
        self.params.validate()?;
        tasks::validate(&self.task)
    }
}

/// One pass/fail check made during a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub criterion: String,
    pub pass: bool,
}

/// A CSV written by a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Artifact {
    pub file: String,
    pub rows: usize,
    pub non_finite: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub checks: Vec<Check>,
    pub artifacts: Vec<Artifact>,
    pub records: Vec<DiscrepancyRecord>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }
}

/// State shared by the task runners.
pub(crate) struct Run {
    dir: PathBuf,
    pub(crate) seed: u64,
    pub(crate) parallel: bool,
    checks: Vec<Check>,
    artifacts: Vec<Artifact>,
    records: Vec<DiscrepancyRecord>,
}

impl Run {
    pub(crate) fn emit(&mut self, file: &str, table: &Table) -> Result<()> {
        let non_finite = emit_csv(table, &self.dir.join(file))?;
        let rows = table.rows.len();
        if non_finite > 0 {
            log::warn!("{file}: {non_finite} non-finite values");
        }
        self.artifacts.push(Artifact {
            file: file.to_string(),
            rows,
            non_finite,
        });
        Ok(())
    }

    pub(crate) fn check(&mut self, name: impl Into<String>, value: f64, criterion: impl Into<String>, pass: bool) {
        let c = Check {
            name: name.into(),
            value,
            criterion: criterion.into(),
            pass,
        };
        log::info!("{} {} = {:e} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value, c.criterion);
        self.checks.push(c);
    }

    pub(crate) fn record(&mut self, r: DiscrepancyRecord) {
        self.records.push(r);
    }
}

/// Runs a validated scenario, writing into `out_dir/<name>/`.
pub fn run_scenario(scenario: &Scenario, out_dir: &Path, parallel: bool) -> Result<RunOutcome> {
    scenario.validate()?;
    let dir = out_dir.join(&scenario.name);
    std::fs::create_dir_all(&dir)?;
    let mut run = Run {
        dir: dir.clone(),
        seed: scenario.seed,
        parallel,
        checks: Vec::new(),
        artifacts: Vec::new(),
        records: Vec::new(),
    };
    tasks::execute(&scenario.task, &scenario.params, &mut run)?;

    let (text, table) = discrepancy_report(&run.records);
    run.emit("discrepancies.csv", &table)?;
    write_atomic(&dir.join("discrepancies.txt"), text.as_bytes())?;
    let summary = summary_text(scenario, &run);
    write_atomic(&dir.join("summary.txt"), summary.as_bytes())?;
    Ok(RunOutcome {
        dir,
        checks: run.checks,
        artifacts: run.artifacts,
        records: run.records,
    })
}

fn summary_text(scenario: &Scenario, run: &Run) -> String {
    let mut s = format!(
        "scenario {}\ntask {}\nseed {}\n\nchecks\n",
        scenario.name,
        scenario.task.name(),
        scenario.seed
    );
    if run.checks.is_empty() {
        s += "  (none)\n";
    }
    for c in &run.checks {
        s += &format!(
            "  {} {} = {} ({})\n",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            format_number(c.value),
            c.criterion
        );
    }
    s += "\nartifacts\n";
    for a in &run.artifacts {
        s += &format!("  {} rows={}", a.file, a.rows);
        if a.non_finite > 0 {
            s += &format!(" non_finite={}", a.non_finite);
        }
        s.push('\n');
    }
    s += &format!("\ndiscrepancy records {}\n", run.records.len());
    s
}

/// Largest deviations found over `n` seeded random jets and parameter sets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub samples: usize,
    /// max over jets and components of |back − jet| / max(1, |jet|) for the
    /// p → p* → p round trip.
    pub round_trip: f64,
    /// max of |r_original(h) − r_starred(to_effective(h))| / max(1, |r|).
    pub residual: f64,
}

/// Parameters drawn over the whole admissible box.
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    ModelParams {
        k: rng.gen_range(0.1..2.0),
        lambda_star: rng.gen_range(1.0..100.0),
        kappa: rng.gen_range(-5.0..5.0),
        alpha: rng.gen_range(0.0..0.9),
        rt: rng.gen_range(0.1..20.0),
        sigma1: rng.gen_range(0.0..1.0),
        sigma2: rng.gen_range(0.0..1.0),
        s1: rng.gen_range(0.0..1.0),
        s2: rng.gen_range(0.0..1.0),
        d1: rng.gen_range(0.0..2.0),
        d2: rng.gen_range(0.0..2.0),
        gamma0: rng.gen_range(0.0..0.5),
        gamma1: rng.gen_range(0.0..0.5),
        gamma2: rng.gen_range(0.0..1.0),
        rho_f0: rng.gen_range(0.5..2.0),
    }
}

/// A jet with physically ordered values and arbitrary derivatives.
pub fn random_jet(rng: &mut impl Rng, kind: PressureKind) -> StateJet {
    let mut jet = |lo: f64, hi: f64| Jet {
        v: rng.gen_range(lo..hi),
        t: rng.gen_range(-1.0..1.0),
        x: rng.gen_range(-1.0..1.0),
        tt: rng.gen_range(-1.0..1.0),
        tx: rng.gen_range(-1.0..1.0),
        xx: rng.gen_range(-1.0..1.0),
    };
    StateJet {
        pressure_kind: kind,
        u: jet(-1.0, 1.0),
        rho: jet(0.5, 2.0),
        pressure: jet(-5.0, 5.0),
        theta_f: jet(0.1, 0.9),
        c1: jet(0.0, 2.0),
        c2: jet(0.0, 2.0),
    }
}

fn jet_components(j: &StateJet) -> impl Iterator<Item = f64> + '_ {
    [j.u, j.rho, j.pressure, j.theta_f, j.c1, j.c2]
        .into_iter()
        .flat_map(|q| [q.v, q.t, q.x, q.tt, q.tx, q.xx])
}

/// Pressure-transform round trip and residual-form equivalence on `n`
/// random hydrostatic jets drawn from ChaCha8 seeded with `seed`.
pub fn identity_check(n: usize, seed: u64) -> Result<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = IdentityCheck {
        samples: n,
        round_trip: 0.0,
        residual: 0.0,
    };
    for _ in 0..n {
        let params = random_params(&mut rng);
        let h = random_jet(&mut rng, PressureKind::Hydrostatic);
        let star = to_effective(&h, &params)?;
        let back = from_effective(&star, &params)?;
        for (a, b) in jet_components(&h).zip(jet_components(&back)) {
            out.round_trip = out.round_trip.max((a - b).abs() / a.abs().max(1.0));
        }
        let ro = residual_original(&h, &params)?;
        let rs = residual_starred(&star, &params)?;
        for k in 0..6 {
            out.residual = out.residual.max((ro[k] - rs[k]).abs() / ro[k].abs().max(1.0));
        }
    }
    Ok(out)
}

/// Pointwise residuals on `grid` as a table (t, x, r1..r6).
pub fn residual_table(
    sol: &dyn FieldSolution,
    grid: &crate::solver::Grid,
    params: &ModelParams,
    source: crate::solver::DerivativeSource,
) -> Result<Table> {
    let mut table = Table::new(&["t", "x", "r1", "r2", "r3", "r4", "r5", "r6"]);
    for j in 0..=grid.nt {
        let t = grid.t(j);
        for i in 0..grid.nx {
            let x = grid.x(i);
            let jet = match source {
                crate::solver::DerivativeSource::Analytic => sol.jet(t, x).ok_or_else(|| Error::Domain {
                    at: x,
                    reason: format!("no analytic jet at t = {t}"),
                })?,
                crate::solver::DerivativeSource::FiniteDifference { h } => crate::field::fd_jet(sol, t, x, h),
            };
            let r = crate::model::residual(&jet, params)?;
            let mut row = vec![t, x];
            row.extend_from_slice(&r.0);
            table.push_nums(&row);
        }
    }
    Ok(table)
}

/// Field values on `grid` as a table (t, x, u, ρ, pressure, θ_F, c₁, c₂).
pub fn field_table(sol: &dyn FieldSolution, grid: &crate::solver::Grid) -> Table {
    let p = match sol.pressure_kind() {
        PressureKind::Effective => "p_star",
        PressureKind::Hydrostatic => "p",
    };
    let mut table = Table::new(&["t", "x", "u", "rho", p, "theta_f", "c1", "c2"]);
    for j in 0..=grid.nt {
        let t = grid.t(j);
        for i in 0..grid.nx {
            let x = grid.x(i);
            let mut row = vec![t, x];
            row.extend_from_slice(&sol.fields(t, x).to_array());
            table.push_nums(&row);
        }
    }
    table
}

pub(crate) fn shared(sol: impl FieldSolution + 'static) -> Arc<dyn FieldSolution> {
    Arc::new(sol)
}
