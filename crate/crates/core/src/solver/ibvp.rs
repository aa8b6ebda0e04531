//! Method-of-lines solver for the osmotically restricted system with κ = 0.
//!
//! State per node: u, w = u_t, ρ, θ_F, q₁ = θ_F c₁, q₂ = θ_F c₂. The volume
//! balance is integrated once in x, p*_x = 2w/k + C(t), with C fixed by the
//! pressure boundary data, so p* is never stepped. Then
//!
//! ```text
//! ρ_t = −wρ_x + 2(ρ_F⁰ − ρ)w_x
//! θ_t = −wθ_x + 2(1 − θ)w_x
//! q_t = −wq_x − 2qw_x + Dc_xx + kS(c_x p*_x + c p*_xx)
//! ρw_t = λ*u_xx − p*_x − ρ_t w − ρww_x
//! ```
//!
//! Space: central second-order differences, upwind first-order for the
//! advection of ρ and θ_F. Time: classical RK4. Dirichlet data are imposed on
//! every stage; Neumann data enter through ghost nodes.

use std::fmt;
use std::sync::Arc;

use super::Grid;
use crate::field::{Domain, FieldSolution, Fields};
use crate::model::{ModelParams, PressureKind};
use crate::families::{family68_build, Family68Params};
use crate::{Error, Result, ScalarFn, Variant};

/// A boundary datum g(t) together with g′(t).
#[derive(Clone)]
pub struct TimeFn(Arc<dyn Fn(f64) -> [f64; 2] + Send + Sync>);

impl TimeFn {
    pub fn new(f: impl Fn(f64) -> [f64; 2] + Send + Sync + 'static) -> Self {
        TimeFn(Arc::new(f))
    }

    pub fn constant(v: f64) -> Self {
        TimeFn::new(move |_| [v, 0.0])
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.0)(t)[0]
    }

    pub fn rate(&self, t: f64) -> f64 {
        (self.0)(t)[1]
    }
}

impl From<ScalarFn> for TimeFn {
    fn from(f: ScalarFn) -> Self {
        TimeFn::new(move |t| [f.value(t), f.derivative(t, 1)])
    }
}

impl fmt::Debug for TimeFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TimeFn")
    }
}

#[derive(Clone, Debug)]
pub enum Bc {
    Dirichlet(TimeFn),
    /// Prescribed x-derivative.
    Neumann(TimeFn),
}


/// One condition per end (left, right) for u, p*, c₁, c₂; optional inflow
/// values for ρ and θ_F, used only where w points into the layer. Without
/// inflow data an entering characteristic carries ρ_x = 0.
#[derive(Clone, Debug)]
pub struct BoundaryConditions {
    pub u: [Bc; 2],
    pub p_star: [Bc; 2],
    pub c1: [Bc; 2],
    pub c2: [Bc; 2],
    pub rho: [Option<TimeFn>; 2],
    pub theta_f: [Option<TimeFn>; 2],
}

impl BoundaryConditions {
    /// Dirichlet data for every field read off a known solution at the ends.
    pub fn from_solution(sol: Arc<dyn FieldSolution>, x_lo: f64, x_hi: f64) -> Self {
        let trace = |x: f64, k: usize| {
            let sol = Arc::clone(&sol);
            TimeFn::new(move |t| {
                if let Some(j) = sol.jet(t, x) {
                    let jets = [j.u, j.rho, j.pressure, j.theta_f, j.c1, j.c2];
                    [jets[k].v, jets[k].t]
                } else {
                    let e = 1e-6 * t.abs().max(1.0);
                    let a = sol.fields(t + e, x).to_array()[k];
                    let b = sol.fields(t - e, x).to_array()[k];
                    [sol.fields(t, x).to_array()[k], (a - b) / (2.0 * e)]
                }
            })
        };
        let pair = |k: usize| [Bc::Dirichlet(trace(x_lo, k)), Bc::Dirichlet(trace(x_hi, k))];
        BoundaryConditions {
            u: pair(0),
            p_star: pair(2),
            c1: pair(4),
            c2: pair(5),
            rho: [Some(trace(x_lo, 1)), Some(trace(x_hi, 1))],
            theta_f: [Some(trace(x_lo, 3)), Some(trace(x_hi, 3))],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Number of stored time levels after the initial one; the actual count
    /// is capped by the number of steps.
    pub snapshots: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { snapshots: 100 }
    }
}

/// Largest admissible step for spacing h:
///
/// ```text
/// Δt ≤ 0.4·min(h²/max(D₁, D₂, kλ*), h/max(√(λ*/ρ_min), a)),   Δt ≤ kρ_min/2
/// ```
///
/// where `a` is the largest advection speed |w| + kSᵢ|p*_x| in the initial
/// state. The last bound covers the drag term 2w/(kρ).
pub fn stability_bound(params: &ModelParams, h: f64, rho_min: f64, advection: f64) -> f64 {
    let diff = params.d1.max(params.d2).max(params.k * params.lambda_star);
    let wave = (params.lambda_star / rho_min).sqrt().max(advection);
    let explicit = 0.4 * (h * h / diff).min(h / wave);
    explicit.min(0.5 * params.k * rho_min)
}

const U: usize = 0;
const W: usize = 1;
const RHO: usize = 2;
const TH: usize = 3;
const Q1: usize = 4;

struct Stepper<'a> {
    params: &'a ModelParams,
    bc: &'a BoundaryConditions,
    n: usize,
    h: f64,
    /// Index of the node whose p* is given by Dirichlet data.
    anchor: usize,
}

impl Stepper<'_> {
    fn field<'s>(&self, y: &'s [f64], f: usize) -> &'s [f64] {
        &y[f * self.n..(f + 1) * self.n]
    }

    fn apply_bc(&self, y: &mut [f64], t: f64) {
        let n = self.n;
        let ends = [0, n - 1];
        for (side, &i) in ends.iter().enumerate() {
            if let Bc::Dirichlet(g) = &self.bc.u[side] {
                y[U * n + i] = g.value(t);
                y[W * n + i] = g.rate(t);
            }
        }
        for (side, &i) in ends.iter().enumerate() {
            let w = y[W * n + i];
            let inflow = if side == 0 { w > 0.0 } else { w < 0.0 };
            if !inflow {
                continue;
            }
            if let Some(g) = &self.bc.theta_f[side] {
                y[TH * n + i] = g.value(t);
            }
            if let Some(g) = &self.bc.rho[side] {
                y[RHO * n + i] = g.value(t);
            }
        }
        for s in 0..2 {
            let bcs = if s == 0 { &self.bc.c1 } else { &self.bc.c2 };
            for (side, &i) in ends.iter().enumerate() {
                if let Bc::Dirichlet(g) = &bcs[side] {
                    y[(Q1 + s) * n + i] = y[TH * n + i] * g.value(t);
                }
            }
        }
    }

    /// First derivative at node i; at an end the ghost value is used when
    /// given, otherwise a one-sided second-order difference.
    fn d1(&self, v: &[f64], i: usize, ghost: [Option<f64>; 2]) -> f64 {
        let (n, h) = (self.n, self.h);
        if i == 0 {
            match ghost[0] {
                Some(g) => (v[1] - g) / (2.0 * h),
                None => (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
            }
        } else if i == n - 1 {
            match ghost[1] {
                Some(g) => (g - v[n - 2]) / (2.0 * h),
                None => (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h),
            }
        } else {
            (v[i + 1] - v[i - 1]) / (2.0 * h)
        }
    }

    /// Second derivative; zero at an end without a ghost (the node is then
    /// overwritten by Dirichlet data).
    fn d2(&self, v: &[f64], i: usize, ghost: [Option<f64>; 2]) -> f64 {
        let (n, h) = (self.n, self.h);
        let (l, r) = if i == 0 {
            match ghost[0] {
                Some(g) => (g, v[1]),
                None => return 0.0,
            }
        } else if i == n - 1 {
            match ghost[1] {
                Some(g) => (v[n - 2], g),
                None => return 0.0,
            }
        } else {
            (v[i - 1], v[i + 1])
        };
        (l - 2.0 * v[i] + r) / (h * h)
    }

    /// Ghost values v₋₁, v_n for Neumann data v_x = g.
    fn ghosts(&self, v: &[f64], bcs: &[Bc; 2], t: f64, rate: bool) -> [Option<f64>; 2] {
        let n = self.n;
        let h = self.h;
        let slope = |b: &Bc| match b {
            Bc::Neumann(g) => Some(if rate { g.rate(t) } else { g.value(t) }),
            Bc::Dirichlet(_) => None,
        };
        [
            slope(&bcs[0]).map(|s| v[1] - 2.0 * h * s),
            slope(&bcs[1]).map(|s| v[n - 2] + 2.0 * h * s),
        ]
    }

    fn trapezoid(&self, v: &[f64], from: usize, to: usize) -> f64 {
        let (a, b, sign) = if from <= to { (from, to, 1.0) } else { (to, from, -1.0) };
        let mut s = 0.0;
        for i in a..b {
            s += 0.5 * (v[i] + v[i + 1]);
        }
        sign * s * self.h
    }

    /// C(t) in p*_x = 2w/k + C.
    fn pressure_offset(&self, w: &[f64], t: f64) -> f64 {
        let k = self.params.k;
        let n = self.n;
        match (&self.bc.p_star[0], &self.bc.p_star[1]) {
            (Bc::Dirichlet(a), Bc::Dirichlet(b)) => {
                let len = self.h * (n - 1) as f64;
                (b.value(t) - a.value(t) - 2.0 / k * self.trapezoid(w, 0, n - 1)) / len
            }
            (Bc::Neumann(g), _) => g.value(t) - 2.0 * w[0] / k,
            (_, Bc::Neumann(g)) => g.value(t) - 2.0 * w[n - 1] / k,
        }
    }

    fn pressure(&self, y: &[f64], t: f64) -> Vec<f64> {
        let w = self.field(y, W);
        let c = self.pressure_offset(w, t);
        let k = self.params.k;
        let a = self.anchor;
        let base = match &self.bc.p_star[if a == 0 { 0 } else { 1 }] {
            Bc::Dirichlet(g) => g.value(t),
            Bc::Neumann(_) => unreachable!("anchor end carries Dirichlet data"),
        };
        (0..self.n)
            .map(|i| base + 2.0 / k * self.trapezoid(w, a, i) + c * self.h * (i as f64 - a as f64))
            .collect()
    }

    fn rhs(&self, y: &[f64], t: f64, dy: &mut [f64]) {
        let n = self.n;
        let pr = self.params;
        let (u, w, rho, th) = (self.field(y, U), self.field(y, W), self.field(y, RHO), self.field(y, TH));
        let u_ghost = self.ghosts(u, &self.bc.u, t, false);
        let w_ghost = self.ghosts(w, &self.bc.u, t, true);
        let offset = self.pressure_offset(w, t);
        let wx: Vec<f64> = (0..n).map(|i| self.d1(w, i, w_ghost)).collect();
        let px: Vec<f64> = w.iter().map(|&wi| 2.0 * wi / pr.k + offset).collect();
        let upwind = |v: &[f64], i: usize| -> f64 {
            if w[i] > 0.0 {
                if i == 0 {
                    0.0
                } else {
                    (v[i] - v[i - 1]) / self.h
                }
            } else if w[i] < 0.0 {
                if i == n - 1 {
                    0.0
                } else {
                    (v[i + 1] - v[i]) / self.h
                }
            } else {
                0.0
            }
        };
        let theta_x: Vec<f64> = (0..n).map(|i| self.d1(th, i, [None, None])).collect();
        for i in 0..n {
            let drho = -w[i] * upwind(rho, i) + 2.0 * (pr.rho_f0 - rho[i]) * wx[i];
            let dth = -w[i] * upwind(th, i) + 2.0 * (1.0 - th[i]) * wx[i];
            let uxx = self.d2(u, i, u_ghost);
            dy[U * n + i] = w[i];
            dy[W * n + i] = (pr.lambda_star * uxx - px[i] - drho * w[i] - rho[i] * w[i] * wx[i]) / rho[i];
            dy[RHO * n + i] = drho;
            dy[TH * n + i] = dth;
        }
        for s in 0..2 {
            let (d, sv, bcs) = if s == 0 {
                (pr.d1, pr.s1, &self.bc.c1)
            } else {
                (pr.d2, pr.s2, &self.bc.c2)
            };
            let q = self.field(y, Q1 + s);
            let c: Vec<f64> = q.iter().zip(th).map(|(q, t)| q / t).collect();
            let ghost = self.ghosts(&c, bcs, t, false);
            for i in 0..n {
                let cx = self.d1(&c, i, ghost);
                let cxx = self.d2(&c, i, ghost);
                let qx = theta_x[i] * c[i] + th[i] * cx;
                let pxx = 2.0 * wx[i] / pr.k;
                dy[(Q1 + s) * n + i] =
                    -w[i] * qx - 2.0 * q[i] * wx[i] + d * cxx + pr.k * sv * (cx * px[i] + c[i] * pxx);
            }
        }
    }
}

/// Stored time levels of a solver run. Evaluation between nodes is bilinear.
#[derive(Clone, Debug)]
pub struct DiscreteSolution {
    pub grid: Grid,
    pub xs: Vec<f64>,
    pub times: Vec<f64>,
    /// levels[j][i] = fields at (times[j], xs[i]), pressure = p*.
    pub levels: Vec<Vec<Fields>>,
    pub steps: usize,
}

impl DiscreteSolution {
    pub fn final_level(&self) -> &[Fields] {
        self.levels.last().expect("at least the initial level")
    }

    /// Max over nodes of |numeric − exact| per field at the final time.
    pub fn final_error(&self, exact: &dyn FieldSolution) -> [f64; 6] {
        let t = *self.times.last().expect("levels");
        let mut e = [0.0_f64; 6];
        for (x, f) in self.xs.iter().zip(self.final_level()) {
            let a = f.to_array();
            let b = exact.fields(t, *x).to_array();
            for k in 0..6 {
                e[k] = e[k].max((a[k] - b[k]).abs());
            }
        }
        e
    }

    /// Rows (t, x, u, ρ, p*, θ_F, c₁, c₂) in time-major order.
    pub fn rows(&self) -> impl Iterator<Item = [f64; 8]> + '_ {
        self.times.iter().zip(&self.levels).flat_map(move |(&t, level)| {
            self.xs.iter().zip(level).map(move |(&x, f)| {
                let a = f.to_array();
                [t, x, a[0], a[1], a[2], a[3], a[4], a[5]]
            })
        })
    }
}

fn bracket(nodes: &[f64], s: f64) -> (usize, f64) {
    let n = nodes.len();
    if n == 1 {
        return (0, 0.0);
    }
    let j = match nodes.partition_point(|&v| v <= s) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    };
    let w = (s - nodes[j]) / (nodes[j + 1] - nodes[j]);
    (j, w.clamp(0.0, 1.0))
}

impl FieldSolution for DiscreteSolution {
    fn pressure_kind(&self) -> PressureKind {
        PressureKind::Effective
    }
    fn domain(&self) -> Domain {
        Domain {
            t: (self.grid.t_lo, *self.times.last().expect("levels")),
            x: (self.grid.x_lo, self.grid.x_hi),
        }
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        let (j, a) = bracket(&self.times, t);
        let (i, b) = bracket(&self.xs, x);
        let at = |jj: usize, ii: usize| self.levels[jj][ii].to_array();
        let j1 = (j + 1).min(self.times.len() - 1);
        let i1 = (i + 1).min(self.xs.len() - 1);
        let mut out = [0.0; 6];
        for k in 0..6 {
            let lo = (1.0 - b) * at(j, i)[k] + b * at(j, i1)[k];
            let hi = (1.0 - b) * at(j1, i)[k] + b * at(j1, i1)[k];
            out[k] = (1.0 - a) * lo + a * hi;
        }
        Fields::from_array(out)
    }
    fn label(&self) -> String {
        format!("ibvp(nx={}, nt={})", self.grid.nx, self.grid.nt)
    }
}

/// Validated initial state and its stability bound.
fn prepare<'a>(
    params: &'a ModelParams,
    initial: &dyn FieldSolution,
    bc: &'a BoundaryConditions,
    grid: &Grid,
) -> Result<(Stepper<'a>, Vec<f64>, f64)> {
    params.validate()?;
    grid.validated()?;
    if params.kappa != 0.0 {
        return Err(Error::Config("time stepping supports kappa = 0 only".into()));
    }
    if !params.gamma_restricted() {
        return Err(Error::Config(
            "time stepping needs gamma0 + gamma1 = sigma1 and gamma2 = alpha sigma2".into(),
        ));
    }
    if initial.pressure_kind() != PressureKind::Effective {
        return Err(Error::PressureKind {
            expected: PressureKind::Effective,
            found: initial.pressure_kind(),
        });
    }
    let anchor = match (&bc.p_star[0], &bc.p_star[1]) {
        (Bc::Dirichlet(_), _) => 0,
        (_, Bc::Dirichlet(_)) => grid.nx - 1,
        _ => return Err(Error::Config("p* needs Dirichlet data at one end at least".into())),
    };
    let n = grid.nx;
    let st = Stepper {
        params,
        bc,
        n,
        h: grid.h(),
        anchor,
    };

    let mut y = vec![0.0; 6 * n];
    let t0 = grid.t_lo;
    for (i, x) in grid.xs().into_iter().enumerate() {
        let f = initial.fields(t0, x);
        let w = match initial.jet(t0, x) {
            Some(j) => j.u.t,
            None => {
                let e = 1e-6 * t0.abs().max(1.0);
                (initial.fields(t0 + e, x).u - initial.fields(t0 - e, x).u) / (2.0 * e)
            }
        };
        y[U * n + i] = f.u;
        y[W * n + i] = w;
        y[RHO * n + i] = f.rho;
        y[TH * n + i] = f.theta_f;
        y[Q1 * n + i] = f.theta_f * f.c1;
        y[(Q1 + 1) * n + i] = f.theta_f * f.c2;
    }
    st.apply_bc(&mut y, t0);
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("initial state is not finite".into()));
    }
    let rho_min = st.field(&y, RHO).iter().cloned().fold(f64::INFINITY, f64::min);
    let theta_min = st.field(&y, TH).iter().cloned().fold(f64::INFINITY, f64::min);
    if !(rho_min > 0.0 && theta_min > 0.0) {
        return Err(Error::Config("initial rho and theta_F must be positive".into()));
    }
    let w0 = st.field(&y, W);
    let offset = st.pressure_offset(w0, t0);
    let smax = params.s1.max(params.s2);
    let advection = w0
        .iter()
        .map(|&w| w.abs() + params.k * smax * (2.0 * w / params.k + offset).abs())
        .fold(0.0, f64::max);
    let bound = stability_bound(params, st.h, rho_min, advection);
    Ok((st, y, bound))
}

/// Smallest step count on `grid`'s interval that satisfies the stability
/// bound for this initial state (`grid.nt` is ignored).
pub fn required_steps(
    params: &ModelParams,
    initial: &dyn FieldSolution,
    bc: &BoundaryConditions,
    grid: &Grid,
) -> Result<usize> {
    let probe = Grid { nt: 1, ..*grid };
    let (_, _, bound) = prepare(params, initial, bc, &probe)?;
    Ok((((grid.t_hi - grid.t_lo) / bound) * (1.0 + 1e-12)).ceil().max(1.0) as usize)
}

/// Steps the system from the state of `initial` at `grid.t_lo` to `grid.t_hi`
/// in `grid.nt` RK4 steps.
pub fn solve_ibvp(
    params: &ModelParams,
    initial: &dyn FieldSolution,
    bc: &BoundaryConditions,
    grid: &Grid,
    options: SolveOptions,
) -> Result<DiscreteSolution> {
    let (st, mut y, bound) = prepare(params, initial, bc, grid)?;
    let n = grid.nx;
    let xs = grid.xs();
    let t0 = grid.t_lo;
    let dt = grid.dt();
    if dt > bound {
        return Err(Error::Config(format!(
            "time step {dt:e} exceeds the stability bound {bound:e}; use nt >= {}",
            ((grid.t_hi - grid.t_lo) / bound).ceil()
        )));
    }

    let stored = options.snapshots.clamp(1, grid.nt);
    let store_at: Vec<usize> = (1..=stored).map(|j| (j * grid.nt + stored / 2) / stored).collect();
    let snapshot = |y: &[f64], t: f64| -> Vec<Fields> {
        let p = st.pressure(y, t);
        (0..n)
            .map(|i| {
                let th = y[TH * n + i];
                Fields {
                    u: y[U * n + i],
                    rho: y[RHO * n + i],
                    pressure: p[i],
                    theta_f: th,
                    c1: y[Q1 * n + i] / th,
                    c2: y[(Q1 + 1) * n + i] / th,
                }
            })
            .collect()
    };
    let mut times = vec![t0];
    let mut levels = vec![snapshot(&y, t0)];

    let mut k = [vec![0.0; 6 * n], vec![0.0; 6 * n], vec![0.0; 6 * n], vec![0.0; 6 * n]];
    let mut stage = vec![0.0; 6 * n];
    let mut next = 0;
    for step in 1..=grid.nt {
        let t = grid.t(step - 1);
        let t1 = grid.t(step);
        let half = t + 0.5 * dt;
        st.rhs(&y, t, &mut k[0]);
        for (s, (&yi, &ki)) in stage.iter_mut().zip(y.iter().zip(&k[0])) {
            *s = yi + 0.5 * dt * ki;
        }
        st.apply_bc(&mut stage, half);
        st.rhs(&stage, half, &mut k[1]);
        for (s, (&yi, &ki)) in stage.iter_mut().zip(y.iter().zip(&k[1])) {
            *s = yi + 0.5 * dt * ki;
        }
        st.apply_bc(&mut stage, half);
        st.rhs(&stage, half, &mut k[2]);
        for (s, (&yi, &ki)) in stage.iter_mut().zip(y.iter().zip(&k[2])) {
            *s = yi + dt * ki;
        }
        st.apply_bc(&mut stage, t1);
        st.rhs(&stage, t1, &mut k[3]);
        for i in 0..6 * n {
            y[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        st.apply_bc(&mut y, t1);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step, t: t1 });
        }
        if next < store_at.len() && store_at[next] == step {
            times.push(t1);
            levels.push(snapshot(&y, t1));
            next += 1;
        }
    }
    log::debug!("ibvp: {} steps of {dt:e}, bound {bound:e}", grid.nt);
    Ok(DiscreteSolution {
        grid: *grid,
        xs,
        times,
        levels,
        steps: grid.nt,
    })
}

/// The manufactured problem used for convergence studies: a t-reduction
/// solution with sinusoidal forcing, λ* = 1 and two distinct solutes.
pub fn manufactured_case() -> (ModelParams, Arc<dyn FieldSolution>) {
    let p = ModelParams {
        k: 1.0,
        lambda_star: 1.0,
        d1: 1.0,
        d2: 0.5,
        s1: 0.5,
        s2: 0.3,
        ..ModelParams::default()
    };
    let fp = Family68Params {
        u1: 0.1,
        u2: 0.2,
        w1: 1.0,
        w2: 1.5,
        f: ScalarFn::sine(0.1, 1.0),
        ..Family68Params::default()
    };
    let sol = family68_build(&p, fp, Variant::Corrected).expect("valid manufactured parameters");
    (p, Arc::new(sol))
}

/// Solves with boundary data read off `exact` for each `nx`, taking the
/// smallest stable step count, and returns (h, final max error per field).
pub fn exact_convergence(
    params: &ModelParams,
    exact: Arc<dyn FieldSolution>,
    x_range: (f64, f64),
    nxs: &[usize],
    t_end: f64,
) -> Result<Vec<(f64, [f64; 6])>> {
    let bc = BoundaryConditions::from_solution(Arc::clone(&exact), x_range.0, x_range.1);
    nxs.iter()
        .map(|&nx| {
            let probe = Grid::new(x_range, nx, (0.0, t_end), 1)?;
            let nt = required_steps(params, exact.as_ref(), &bc, &probe)?;
            let grid = Grid { nt, ..probe };
            let sol = solve_ibvp(params, exact.as_ref(), &bc, &grid, SolveOptions { snapshots: 1 })?;
            Ok((grid.h(), sol.final_error(exact.as_ref())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{fitted_order, convergence_order};
    use super::*;
    use crate::field::ConstantSolution;

    fn constant_bc(f: Fields) -> BoundaryConditions {
        let d = |v: f64| [Bc::Dirichlet(TimeFn::constant(v)), Bc::Dirichlet(TimeFn::constant(v))];
        BoundaryConditions {
            u: d(f.u),
            p_star: d(f.pressure),
            c1: d(f.c1),
            c2: d(f.c2),
            rho: [None, None],
            theta_f: [None, None],
        }
    }

    #[test]
    fn equilibrium_is_preserved() {
        let values = Fields::from_array([0.1, 1.3, 2.0, 0.6, 0.4, 0.2]);
        let init = ConstantSolution {
            kind: PressureKind::Effective,
            values,
        };
        let p = ModelParams {
            lambda_star: 1.0,
            ..ModelParams::default()
        };
        let grid = Grid::new((0.0, 1.0), 21, (0.0, 0.1), 200).unwrap();
        let sol = solve_ibvp(&p, &init, &constant_bc(values), &grid, SolveOptions::default()).unwrap();
        for level in &sol.levels {
            for f in level {
                for (a, b) in f.to_array().iter().zip(values.to_array()) {
                    assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs(), "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn step_above_bound_is_rejected() {
        let values = Fields::from_array([0.0, 1.0, 0.0, 0.5, 0.0, 0.0]);
        let init = ConstantSolution {
            kind: PressureKind::Effective,
            values,
        };
        let grid = Grid::new((0.0, 1.0), 21, (0.0, 1.0), 10).unwrap();
        let r = solve_ibvp(&ModelParams::default(), &init, &constant_bc(values), &grid, SolveOptions::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn unrestricted_parameters_are_rejected() {
        let values = Fields::from_array([0.0, 1.0, 0.0, 0.5, 0.0, 0.0]);
        let init = ConstantSolution {
            kind: PressureKind::Effective,
            values,
        };
        let grid = Grid::new((0.0, 1.0), 5, (0.0, 1e-6), 1).unwrap();
        let p = ModelParams {
            sigma1: 0.3,
            ..ModelParams::default()
        };
        assert!(solve_ibvp(&p, &init, &constant_bc(values), &grid, SolveOptions::default()).is_err());
        let p = ModelParams {
            kappa: 1.0,
            ..ModelParams::default()
        };
        assert!(solve_ibvp(&p, &init, &constant_bc(values), &grid, SolveOptions::default()).is_err());
    }

    pub(crate) fn manufactured_errors(nxs: &[usize], t_end: f64) -> Vec<(f64, [f64; 6])> {
        let (p, exact) = manufactured_case();
        exact_convergence(&p, exact, (0.0, 1.0), nxs, t_end).unwrap()
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        let errs = manufactured_errors(&[11, 21, 41], 0.2);
        // u and p* are quadratic and linear in x here, so only the solutes
        // carry spatial truncation error.
        for (h, e) in &errs {
            assert!(e[0] < 1e-10 && e[2] < 1e-10, "h={h}: {e:?}");
        }
        for k in [4, 5] {
            let pairs: Vec<(f64, f64)> = errs.iter().map(|(h, e)| (*h, e[k])).collect();
            let orders = convergence_order(&pairs).unwrap();
            for o in &orders {
                assert!((1.8..=2.2).contains(o), "field {k}: {pairs:?} {orders:?}");
            }
            assert!(fitted_order(&pairs).unwrap() > 1.8);
        }
    }

    #[test]
    fn zero_flux_diffusion_conserves_solute() {
        // u ≡ 0, p* ≡ const: the solute only diffuses.
        let p = ModelParams {
            lambda_star: 1.0,
            ..ModelParams::default()
        };
        let init = crate::families::family75_build(
            &p,
            crate::families::Family75Params {
                theta_f0: 0.5,
                v1: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        struct Bump<S>(S);
        impl<S: FieldSolution> FieldSolution for Bump<S> {
            fn domain(&self) -> Domain {
                self.0.domain()
            }
            fn fields(&self, t: f64, x: f64) -> Fields {
                let mut f = self.0.fields(t, x);
                f.c1 = (-40.0 * (x - 0.3) * (x - 0.3)).exp();
                f
            }
        }
        let init = Bump(init);
        let zero = |v: f64| TimeFn::constant(v);
        let bc = BoundaryConditions {
            u: [Bc::Dirichlet(zero(0.0)), Bc::Dirichlet(zero(0.0))],
            p_star: [Bc::Dirichlet(zero(0.0)), Bc::Dirichlet(zero(0.0))],
            c1: [Bc::Neumann(zero(0.0)), Bc::Neumann(zero(0.0))],
            c2: [Bc::Neumann(zero(0.0)), Bc::Neumann(zero(0.0))],
            rho: [None, None],
            theta_f: [None, None],
        };
        let grid = Grid::new((0.0, 1.0), 41, (0.0, 0.5), 2500).unwrap();
        let sol = solve_ibvp(&p, &init, &bc, &grid, SolveOptions { snapshots: 10 }).unwrap();
        let h = grid.h();
        let mass = |level: &[Fields]| {
            let q: Vec<f64> = level.iter().map(|f| f.theta_f * f.c1).collect();
            h * (q.iter().sum::<f64>() - 0.5 * (q[0] + q[q.len() - 1]))
        };
        let m0 = mass(&sol.levels[0]);
        let m1 = mass(sol.final_level());
        assert!((m1 - m0).abs() <= 1e-12 * m0, "{m0} -> {m1}");
        // and the bump has actually spread
        assert!(sol.final_level()[12].c1 < 0.6);
    }

    #[test]
    fn runs_are_bitwise_reproducible() {
        let a = manufactured_errors(&[11], 0.05);
        let b = manufactured_errors(&[11], 0.05);
        assert_eq!(a[0].1.map(f64::to_bits), b[0].1.map(f64::to_bits));
    }
}
