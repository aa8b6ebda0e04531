use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{convergence_order, Grid};
use crate::field::{fd_jet, FieldSolution};
use crate::model::{residual, ModelParams};
use crate::{Error, Result};

/// Where the derivatives fed to the residual forms come from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivativeSource {
    Analytic,
    /// Centred second-order differences of the field values with step h.
    FiniteDifference { h: f64 },
}

impl std::fmt::Display for DerivativeSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DerivativeSource::Analytic => f.write_str("analytic"),
            DerivativeSource::FiniteDifference { h } => write!(f, "fd(h={h:e})"),
        }
    }
}

/// Residual norms of one solution over a grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub label: String,
    pub source: DerivativeSource,
    pub grid: Grid,
    /// max |rᵢ| over the nodes.
    pub linf: [f64; 6],
    /// Root mean square of rᵢ over the nodes.
    pub l2: [f64; 6],
    /// (t, x) where |rᵢ| is largest.
    pub argmax: [(f64, f64); 6],
    /// Observed orders of the L∞ norms under step refinement, one entry per
    /// adjacent pair; present only for refinement studies.
    pub orders: Option<[Vec<f64>; 6]>,
}

pub const EQUATION_NAMES: [&str; 6] = ["volume", "mass", "fluid_fraction", "solute1", "solute2", "momentum"];

impl ResidualReport {
    pub fn max_linf(&self) -> f64 {
        self.linf.iter().cloned().fold(0.0, f64::max)
    }

    /// Human-readable block, one line per equation.
    pub fn summary(&self) -> String {
        let mut s = format!("residuals of {} ({}), {}x{} nodes\n", self.label, self.source, self.grid.nt + 1, self.grid.nx);
        for i in 0..6 {
            s += &format!(
                "  r{} {:<15} Linf {:.6e} at (t={:.4}, x={:.4})  L2 {:.6e}",
                i + 1,
                EQUATION_NAMES[i],
                self.linf[i],
                self.argmax[i].0,
                self.argmax[i].1,
                self.l2[i]
            );
            if let Some(orders) = &self.orders {
                let o: Vec<String> = orders[i].iter().map(|p| format!("{p:.3}")).collect();
                s += &format!("  orders [{}]", o.join(", "));
            }
            s.push('\n');
        }
        s
    }
}

/// Residuals at every node of `grid`, sequentially.
pub fn residual_scan(
    sol: &dyn FieldSolution,
    grid: &Grid,
    params: &ModelParams,
    source: DerivativeSource,
) -> Result<ResidualReport> {
    residual_scan_with(sol, grid, params, source, false)
}

/// As [`residual_scan`], optionally evaluating the nodes on the rayon pool.
/// The reduction runs in node order either way, so the report is identical.
pub fn residual_scan_with(
    sol: &dyn FieldSolution,
    grid: &Grid,
    params: &ModelParams,
    source: DerivativeSource,
    parallel: bool,
) -> Result<ResidualReport> {
    grid.validated()?;
    let domain = sol.domain();
    domain.check(grid.t_lo, grid.x_lo)?;
    domain.check(grid.t_hi, grid.x_hi)?;
    if let DerivativeSource::FiniteDifference { h } = source {
        if !(h > 0.0) {
            return Err(Error::Config(format!("difference step must be positive, got {h}")));
        }
    }
    let nodes: Vec<(f64, f64)> = (0..=grid.nt)
        .flat_map(|j| (0..grid.nx).map(move |i| (j, i)))
        .map(|(j, i)| (grid.t(j), grid.x(i)))
        .collect();
    let eval = |&(t, x): &(f64, f64)| -> Result<[f64; 6]> {
        let jet = match source {
            DerivativeSource::Analytic => sol.jet(t, x).ok_or_else(|| Error::Domain {
                at: x,
                reason: format!("no analytic derivatives for {} at t = {t}", sol.label()),
            })?,
            DerivativeSource::FiniteDifference { h } => fd_jet(sol, t, x, h),
        };
        let r = residual(&jet, params)?;
        if !r.is_finite() {
            return Err(Error::Domain {
                at: x,
                reason: format!("non-finite residual at t = {t} (stencil left the domain of {})", sol.label()),
            });
        }
        Ok(r.0)
    };
    let values: Vec<Result<[f64; 6]>> = if parallel {
        nodes.par_iter().map(eval).collect()
    } else {
        nodes.iter().map(eval).collect()
    };

    let mut linf = [0.0; 6];
    let mut sq = [0.0; 6];
    let mut argmax = [(grid.t_lo, grid.x_lo); 6];
    for (node, r) in nodes.iter().zip(values) {
        let r = r?;
        for k in 0..6 {
            let a = r[k].abs();
            if a > linf[k] {
                linf[k] = a;
                argmax[k] = *node;
            }
            sq[k] += a * a;
        }
    }
    let n = nodes.len() as f64;
    Ok(ResidualReport {
        label: sol.label(),
        source,
        grid: *grid,
        linf,
        l2: sq.map(|s| (s / n).sqrt()),
        argmax,
        orders: None,
    })
}

/// Finite-difference scans at each step in `steps` (at least three, strictly
/// decreasing). Returns the finest report with per-equation orders attached;
/// an order is NaN where a norm is zero or not decreasing.
pub fn residual_refinement(
    sol: &dyn FieldSolution,
    grid: &Grid,
    params: &ModelParams,
    steps: &[f64],
    parallel: bool,
) -> Result<(Vec<ResidualReport>, ResidualReport)> {
    if steps.len() < 3 {
        return Err(Error::Config("refinement needs at least three steps".into()));
    }
    let reports = steps
        .iter()
        .map(|&h| residual_scan_with(sol, grid, params, DerivativeSource::FiniteDifference { h }, parallel))
        .collect::<Result<Vec<_>>>()?;
    let mut orders: [Vec<f64>; 6] = Default::default();
    for (k, order) in orders.iter_mut().enumerate() {
        let pairs: Vec<(f64, f64)> = steps.iter().zip(&reports).map(|(&h, r)| (h, r.linf[k])).collect();
        *order = match convergence_order(&pairs) {
            Ok(p) => p,
            Err(_) => pairs
                .windows(2)
                .map(|w| {
                    convergence_order(w)
                        .map(|p| p[0])
                        .unwrap_or(f64::NAN)
                })
                .collect(),
        };
    }
    let mut finest = reports.last().cloned().expect("three reports");
    finest.orders = Some(orders);
    Ok((reports, finest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{example2_solution, family68_build, Family68Params};
    use crate::field::{ConstantSolution, Fields};
    use crate::{PressureKind, ScalarFn, Variant};

    #[test]
    fn constant_solution_has_zero_residual() {
        let sol = ConstantSolution {
            kind: PressureKind::Effective,
            values: Fields::from_array([0.3, 1.0, 2.0, 0.7, 0.1, 0.2]),
        };
        let g = Grid::new((0.0, 1.0), 11, (0.0, 1.0), 10).unwrap();
        let p = ModelParams::default();
        for src in [DerivativeSource::Analytic, DerivativeSource::FiniteDifference { h: 1e-3 }] {
            assert_eq!(residual_scan(&sol, &g, &p, src).unwrap().max_linf(), 0.0);
        }
    }

    #[test]
    fn example2_scans() {
        let g = Grid::new((0.0, 0.4), 101, (0.0, 1.0), 100).unwrap();
        let (corrected, _, p) = example2_solution(Variant::Corrected).unwrap();
        let rep = residual_scan(&corrected, &g, &p, DerivativeSource::Analytic).unwrap();
        assert!(rep.max_linf() <= 1e-8, "{}", rep.summary());

        let (printed, ..) = example2_solution(Variant::AsPrinted).unwrap();
        let rep = residual_scan(&printed, &g, &p, DerivativeSource::Analytic).unwrap();
        assert!((rep.linf[2] - 1.0).abs() < 1e-12);
        assert_eq!(rep.argmax[2].1, 0.0);
        for h in [1e-2, 5e-3, 2.5e-3] {
            let fd = residual_scan(&printed, &g, &p, DerivativeSource::FiniteDifference { h }).unwrap();
            assert!((fd.linf[2] - 1.0).abs() < 1e-3, "h={h}: {}", fd.linf[2]);
        }
    }

    #[test]
    fn parallel_scan_is_identical() {
        let g = Grid::new((0.0, 0.4), 31, (0.0, 1.0), 20).unwrap();
        let (sol, _, p) = example2_solution(Variant::AsPrinted).unwrap();
        let a = residual_scan_with(&sol, &g, &p, DerivativeSource::FiniteDifference { h: 1e-3 }, false).unwrap();
        let b = residual_scan_with(&sol, &g, &p, DerivativeSource::FiniteDifference { h: 1e-3 }, true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fd_residual_of_exact_family_is_second_order() {
        let p = ModelParams {
            lambda_star: 2.0,
            ..ModelParams::default()
        };
        let fp = Family68Params {
            u1: 0.2,
            u2: 0.1,
            f: ScalarFn::sine(0.1, 1.0),
            ..Family68Params::default()
        };
        let sol = family68_build(&p, fp, Variant::Corrected).unwrap();
        let g = Grid::new((0.0, 1.0), 11, (0.0, 1.0), 10).unwrap();
        let (_, rep) = residual_refinement(&sol, &g, &p, &[1e-2, 5e-3, 2.5e-3], false).unwrap();
        let orders = rep.orders.unwrap();
        for k in [3, 5] {
            for &o in &orders[k] {
                assert!(o >= 1.8, "r{}: {:?}", k + 1, orders[k]);
            }
        }
    }

    #[test]
    fn missing_jet_is_a_domain_error() {
        struct NoJet;
        impl FieldSolution for NoJet {
            fn domain(&self) -> crate::Domain {
                crate::Domain::everywhere()
            }
            fn fields(&self, _t: f64, _x: f64) -> Fields {
                Fields::default()
            }
        }
        let g = Grid::new((0.0, 1.0), 3, (0.0, 1.0), 1).unwrap();
        let r = residual_scan(&NoJet, &g, &ModelParams::default(), DerivativeSource::Analytic);
        assert!(matches!(r, Err(Error::Domain { .. })));
    }
}
