//! The common currency between exact families, the solver, the residual
//! oracle and the symmetry orbits: an immutable map (t, x) → state.

use std::sync::Arc;

use crate::model::{from_effective, Jet, ModelParams, PressureKind, StateJet};
use crate::{Error, Result};

/// Field values at one point, in the order u, ρ, pressure, θ_F, c₁, c₂.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Fields {
    pub u: f64,
    pub rho: f64,
    pub pressure: f64,
    pub theta_f: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Fields {
    pub const NAMES: [&'static str; 6] = ["u", "rho", "pressure", "theta_F", "c1", "c2"];

    pub fn to_array(self) -> [f64; 6] {
        [self.u, self.rho, self.pressure, self.theta_f, self.c1, self.c2]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Fields {
            u: a[0],
            rho: a[1],
            pressure: a[2],
            theta_f: a[3],
            c1: a[4],
            c2: a[5],
        }
    }
}

impl From<&StateJet> for Fields {
    fn from(j: &StateJet) -> Self {
        Fields {
            u: j.u.v,
            rho: j.rho.v,
            pressure: j.pressure.v,
            theta_f: j.theta_f.v,
            c1: j.c1.v,
            c2: j.c2.v,
        }
    }
}

/// Closed rectangle of validity in (t, x). Bounds may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub t: (f64, f64),
    pub x: (f64, f64),
}

impl Domain {
    pub fn everywhere() -> Self {
        Domain {
            t: (f64::NEG_INFINITY, f64::INFINITY),
            x: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        t >= self.t.0 && t <= self.t.1 && x >= self.x.0 && x <= self.x.1
    }

    /// Domain of the solution after its arguments are shifted by (dt, dx).
    pub fn shifted(&self, dt: f64, dx: f64) -> Self {
        Domain {
            t: (self.t.0 + dt, self.t.1 + dt),
            x: (self.x.0 + dx, self.x.1 + dx),
        }
    }

    pub fn check(&self, t: f64, x: f64) -> Result<()> {
        if self.contains(t, x) {
            Ok(())
        } else if !(x >= self.x.0 && x <= self.x.1) {
            Err(Error::Domain {
                at: x,
                reason: format!("x outside [{}, {}]", self.x.0, self.x.1),
            })
        } else {
            Err(Error::Domain {
                at: t,
                reason: format!("t outside [{}, {}]", self.t.0, self.t.1),
            })
        }
    }
}

/// A candidate solution of the governing system.
///
/// Implementations are immutable; evaluation is pure and may run from many
/// threads at once.
pub trait FieldSolution: Send + Sync {
    fn pressure_kind(&self) -> PressureKind {
        PressureKind::Effective
    }

    fn domain(&self) -> Domain;

    /// Field values. Callers are responsible for staying inside `domain()`.
    fn fields(&self, t: f64, x: f64) -> Fields;

    /// Value and analytic derivatives, when the solution knows them.
    fn jet(&self, _t: f64, _x: f64) -> Option<StateJet> {
        None
    }

    fn label(&self) -> String {
        "solution".to_string()
    }
}

impl<S: FieldSolution + ?Sized> FieldSolution for Arc<S> {
    fn pressure_kind(&self) -> PressureKind {
        (**self).pressure_kind()
    }
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        (**self).fields(t, x)
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        (**self).jet(t, x)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// Jet built from centred second-order differences of the six field values
/// with step `h` in both t and x.
pub fn fd_jet(sol: &dyn FieldSolution, t: f64, x: f64, h: f64) -> StateJet {
    let at = |dt: f64, dx: f64| sol.fields(t + dt * h, x + dx * h).to_array();
    let c = at(0.0, 0.0);
    let tp = at(1.0, 0.0);
    let tm = at(-1.0, 0.0);
    let xp = at(0.0, 1.0);
    let xm = at(0.0, -1.0);
    let pp = at(1.0, 1.0);
    let pm = at(1.0, -1.0);
    let mp = at(-1.0, 1.0);
    let mm = at(-1.0, -1.0);
    let jet = |i: usize| Jet {
        v: c[i],
        t: (tp[i] - tm[i]) / (2.0 * h),
        x: (xp[i] - xm[i]) / (2.0 * h),
        tt: (tp[i] - 2.0 * c[i] + tm[i]) / (h * h),
        tx: (pp[i] - pm[i] - mp[i] + mm[i]) / (4.0 * h * h),
        xx: (xp[i] - 2.0 * c[i] + xm[i]) / (h * h),
    };
    StateJet {
        pressure_kind: sol.pressure_kind(),
        u: jet(0),
        rho: jet(1),
        pressure: jet(2),
        theta_f: jet(3),
        c1: jet(4),
        c2: jet(5),
    }
}

/// A spatially and temporally uniform state.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSolution {
    pub kind: PressureKind,
    pub values: Fields,
}

impl FieldSolution for ConstantSolution {
    fn pressure_kind(&self) -> PressureKind {
        self.kind
    }
    fn domain(&self) -> Domain {
        Domain::everywhere()
    }
    fn fields(&self, _t: f64, _x: f64) -> Fields {
        self.values
    }
    fn jet(&self, _t: f64, _x: f64) -> Option<StateJet> {
        Some(StateJet::constant(self.kind, self.values.to_array()))
    }
    fn label(&self) -> String {
        "constant".into()
    }
}

/// Hydrostatic-pressure view of an effective-pressure solution.
pub struct HydrostaticView {
    inner: Arc<dyn FieldSolution>,
    params: ModelParams,
}

impl HydrostaticView {
    pub fn new(inner: Arc<dyn FieldSolution>, params: ModelParams) -> Result<Self> {
        if inner.pressure_kind() != PressureKind::Effective {
            return Err(Error::PressureKind {
                expected: PressureKind::Effective,
                found: inner.pressure_kind(),
            });
        }
        Ok(HydrostaticView { inner, params })
    }
}

impl FieldSolution for HydrostaticView {
    fn pressure_kind(&self) -> PressureKind {
        PressureKind::Hydrostatic
    }
    fn domain(&self) -> Domain {
        self.inner.domain()
    }
    fn fields(&self, t: f64, x: f64) -> Fields {
        let mut f = self.inner.fields(t, x);
        f.pressure += self.params.t1() * f.c1 + self.params.alpha * self.params.t2() * f.c2;
        f
    }
    fn jet(&self, t: f64, x: f64) -> Option<StateJet> {
        let j = self.inner.jet(t, x)?;
        from_effective(&j, &self.params).ok()
    }
    fn label(&self) -> String {
        format!("{} (hydrostatic)", self.inner.label())
    }
}
