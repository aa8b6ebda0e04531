//! Residual scans, the method-of-lines solver and observed-order estimates.

mod ibvp;
mod scan;

pub use ibvp::{
    exact_convergence, manufactured_case, required_steps, solve_ibvp, stability_bound, Bc, BoundaryConditions, DiscreteSolution, SolveOptions, TimeFn,
};
pub use scan::{residual_refinement, residual_scan, residual_scan_with, DerivativeSource, EQUATION_NAMES, ResidualReport};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform tensor grid: `nx` nodes in x including both ends, `nt` steps in t
/// (so `nt + 1` time levels).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub nx: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub nt: usize,
}

impl Grid {
    pub fn new(x: (f64, f64), nx: usize, t: (f64, f64), nt: usize) -> Result<Self> {
        Grid {
            x_lo: x.0,
            x_hi: x.1,
            nx,
            t_lo: t.0,
            t_hi: t.1,
            nt,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        if self.nx < 3 {
            return Err(Error::Config(format!("grid needs nx >= 3, got {}", self.nx)));
        }
        if self.nt < 1 {
            return Err(Error::Config("grid needs nt >= 1".into()));
        }
        if !(self.x_hi > self.x_lo) || !self.x_lo.is_finite() || !self.x_hi.is_finite() {
            return Err(Error::Config(format!("bad x range [{}, {}]", self.x_lo, self.x_hi)));
        }
        if !(self.t_hi > self.t_lo) || !self.t_lo.is_finite() || !self.t_hi.is_finite() {
            return Err(Error::Config(format!("bad t range [{}, {}]", self.t_lo, self.t_hi)));
        }
        Ok(self)
    }

    pub fn h(&self) -> f64 {
        (self.x_hi - self.x_lo) / (self.nx - 1) as f64
    }

    pub fn dt(&self) -> f64 {
        (self.t_hi - self.t_lo) / self.nt as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nx {
            self.x_hi
        } else {
            self.x_lo + i as f64 * self.h()
        }
    }

    pub fn t(&self, j: usize) -> f64 {
        if j == self.nt {
            self.t_hi
        } else {
            self.t_lo + j as f64 * self.dt()
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }
}

/// Observed order log(e₁/e₂)/log(h₁/h₂) for each adjacent pair of (h, error).
pub fn convergence_order(errors: &[(f64, f64)]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(Error::Order("need at least two (h, error) pairs".into()));
    }
    errors
        .windows(2)
        .map(|w| {
            let ((h1, e1), (h2, e2)) = (w[0], w[1]);
            if !(h2 < h1 && h2 > 0.0) {
                return Err(Error::Order(format!("h must decrease strictly, got {h1} then {h2}")));
            }
            if !(e1 > 0.0 && e2 > 0.0) || !e1.is_finite() || !e2.is_finite() {
                return Err(Error::Order(format!("errors must be positive and finite, got {e1}, {e2}")));
            }
            Ok((e1 / e2).ln() / (h1 / h2).ln())
        })
        .collect()
}

/// Least-squares slope of log e against log h.
pub fn fitted_order(errors: &[(f64, f64)]) -> Result<f64> {
    convergence_order(errors)?;
    let n = errors.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(h, e) in errors {
        let (lx, ly) = (h.ln(), e.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_quadratic_errors() {
        let e: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|&h| (h, 3.0 * h * h)).collect();
        for p in convergence_order(&e).unwrap() {
            assert!((p - 2.0).abs() < 1e-12);
        }
        assert!((fitted_order(&e).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_error_is_rejected() {
        assert!(matches!(
            convergence_order(&[(0.1, 1e-3), (0.05, 0.0)]),
            Err(Error::Order(_))
        ));
        assert!(convergence_order(&[(0.1, 1e-3)]).is_err());
        assert!(convergence_order(&[(0.1, 1e-3), (0.2, 1e-4)]).is_err());
    }

    #[test]
    fn grid_nodes_hit_the_ends() {
        let g = Grid::new((0.0, 0.4), 101, (0.0, 1.0), 100).unwrap();
        assert_eq!(g.x(100), 0.4);
        assert_eq!(g.t(100), 1.0);
        assert!((g.h() - 0.004).abs() < 1e-16);
        assert!(Grid::new((0.0, 1.0), 2, (0.0, 1.0), 1).is_err());
        assert!(Grid::new((1.0, 0.0), 5, (0.0, 1.0), 1).is_err());
    }
}
