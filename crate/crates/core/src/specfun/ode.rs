//! Fundamental systems of a(x) f″ + b(x) f′ + c(x) f = 0.

use std::sync::Arc;

use super::roots::root_bracketed;

use crate::{Error, Result};

const MAX_STEPS: usize = 200_000;
const SCAN_POINTS: usize = 2000;

/// Coefficients [a, b, c] as a function of x.
pub type Coefficients = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// A pair of independent solutions of a linear second-order ODE.
pub trait SolutionPair: Send + Sync {
    /// `[[f₁, f₁′, f₁″], [f₂, f₂′, f₂″]]` at x.
    fn eval(&self, x: f64) -> Result<[[f64; 3]; 2]>;

    fn wronskian(&self, x: f64) -> Result<f64> {
        let [f1, f2] = self.eval(x)?;
        Ok(f1[0] * f2[1] - f1[1] * f2[0])
    }
}

#[derive(Clone, Copy, Debug)]
struct Node {
    x: f64,
    y: [f64; 4],
    ypp: [f64; 2],
}

/// Numerically integrated pair normalised at the anchor by f₁ = 1, f₁′ = 0,
/// f₂ = 0, f₂′ = 1. Between accepted steps f is a quintic Hermite
/// interpolant of f, f′, f″; f′ is its derivative and f″ comes from the ODE.
#[derive(Clone)]
pub struct FundamentalPair {
    anchor: f64,
    nodes: Vec<Node>,
    coeffs: Coefficients,
}

impl std::fmt::Debug for FundamentalPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FundamentalPair")
            .field("anchor", &self.anchor)
            .field("span", &self.span())
            .field("steps", &(self.nodes.len() - 1))
            .finish()
    }
}

impl FundamentalPair {
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0].x, self.nodes[self.nodes.len() - 1].x)
    }

    fn interpolate(&self, x: f64) -> Result<[[f64; 2]; 2]> {
        let (lo, hi) = self.span();
        let slack = 1e-12 * (hi - lo).max(1.0);
        if !(x >= lo - slack && x <= hi + slack) {
            return Err(Error::Domain {
                at: x,
                reason: format!("outside integrated span [{lo}, {hi}]"),
            });
        }
        if self.nodes.len() == 1 {
            let y = self.nodes[0].y;
            return Ok([[y[0], y[1]], [y[2], y[3]]]);
        }
        let i = self
            .nodes
            .partition_point(|n| n.x <= x)
            .clamp(1, self.nodes.len() - 1);
        let (n0, n1) = (&self.nodes[i - 1], &self.nodes[i]);
        let h = n1.x - n0.x;
        let s = (x - n0.x) / h;
        let mut out = [[0.0; 2]; 2];
        for k in 0..2 {
            let (p, dp) = quintic_hermite(
                s,
                h,
                [n0.y[2 * k], n0.y[2 * k + 1], n0.ypp[k]],
                [n1.y[2 * k], n1.y[2 * k + 1], n1.ypp[k]],
            );
            out[k] = [p, dp];
        }
        Ok(out)
    }
}

impl SolutionPair for FundamentalPair {
    fn eval(&self, x: f64) -> Result<[[f64; 3]; 2]> {
        let [f1, f2] = self.interpolate(x)?;
        let [a, b, c] = (self.coeffs)(x);
        let second = |f: [f64; 2]| -(b * f[1] + c * f[0]) / a;
        Ok([[f1[0], f1[1], second(f1)], [f2[0], f2[1], second(f2)]])
    }
}

/// Value and x-derivative of the quintic Hermite interpolant on a step of
/// length h at s ∈ [0, 1], given (f, f′, f″) at both ends.
fn quintic_hermite(s: f64, h: f64, y0: [f64; 3], y1: [f64; 3]) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let basis = [
        1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5,
        s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5,
        0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5),
        10.0 * s3 - 15.0 * s4 + 6.0 * s5,
        -4.0 * s3 + 7.0 * s4 - 3.0 * s5,
        0.5 * (s3 - 2.0 * s4 + s5),
    ];
    let dbasis = [
        -30.0 * s2 + 60.0 * s3 - 30.0 * s4,
        1.0 - 18.0 * s2 + 32.0 * s3 - 15.0 * s4,
        0.5 * (2.0 * s - 9.0 * s2 + 12.0 * s3 - 5.0 * s4),
        30.0 * s2 - 60.0 * s3 + 30.0 * s4,
        -12.0 * s2 + 28.0 * s3 - 15.0 * s4,
        0.5 * (3.0 * s2 - 8.0 * s3 + 5.0 * s4),
    ];
    let w = [y0[0], h * y0[1], h * h * y0[2], y1[0], h * y1[1], h * h * y1[2]];
    let p = (0..6).map(|i| w[i] * basis[i]).sum();
    let dp = (0..6).map(|i| w[i] * dbasis[i]).sum::<f64>() / h;
    (p, dp)
}

/// Locates a zero or sign change of a(x) on [lo, hi].
fn find_singularity(a: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let mut prev_x = lo;
    let mut prev = a(lo);
    if prev == 0.0 || !prev.is_finite() {
        return Some(lo);
    }
    for i in 1..=SCAN_POINTS {
        let x = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
        let v = a(x);
        if v == 0.0 || !v.is_finite() {
            return Some(x);
        }
        if (v > 0.0) != (prev > 0.0) {
            return Some(root_bracketed(a, prev_x, x, 1e-14).unwrap_or(x));
        }
        prev_x = x;
        prev = v;
    }
    None
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn rhs(coeffs: &Coefficients, x: f64, y: &[f64; 4]) -> [f64; 4] {
    let [a, b, c] = coeffs(x);
    [
        y[1],
        -(b * y[1] + c * y[0]) / a,
        y[3],
        -(b * y[3] + c * y[2]) / a,
    ]
}

fn node(coeffs: &Coefficients, x: f64, y: [f64; 4]) -> Node {
    let d = rhs(coeffs, x, &y);
    Node {
        x,
        y,
        ypp: [d[1], d[3]],
    }
}

/// Integrates from x0 to `end` (either direction), appending accepted nodes
/// after the anchor node.
fn integrate_leg(coeffs: &Coefficients, x0: f64, end: f64, tol: f64) -> Result<Vec<Node>> {
    let mut out = Vec::new();
    if end == x0 {
        return Ok(out);
    }
    let dir = (end - x0).signum();
    let len = (end - x0).abs();
    let step_tol = tol * 1e-2;
    let mut x = x0;
    let mut y = [1.0, 0.0, 0.0, 1.0];
    let mut h = len / 64.0;
    let mut k = [[0.0; 4]; 7];
    k[0] = rhs(coeffs, x, &y);
    for _ in 0..MAX_STEPS {
        let remaining = (end - x).abs();
        if remaining <= 1e-14 * len {
            return Ok(out);
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for (yi, ki) in ys.iter_mut().zip(kj) {
                    *yi += hs * A[s][j] * ki;
                }
            }
            k[s] = rhs(coeffs, x + C[s] * hs, &ys);
        }
        let mut y_new = y;
        let mut err = 0.0_f64;
        for i in 0..4 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y_new[i] = y[i] + hs * d5;
            let scale = step_tol * (1.0 + y[i].abs().max(y_new[i].abs()));
            err = err.max((hs * (d5 - d4)).abs() / scale);
        }
        if !err.is_finite() {
            return Err(Error::Accuracy {
                estimate: f64::INFINITY,
                tol,
            });
        }
        if err <= 1.0 {
            x = if last { end } else { x + hs };
            y = y_new;
            k[0] = k[6];
            out.push(node(coeffs, x, y));
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h.min(remaining) * factor).min(len);
        if h < 1e-14 * len {
            return Err(Error::Accuracy {
                estimate: err * step_tol,
                tol,
            });
        }
    }
    Err(Error::Accuracy {
        estimate: f64::NAN,
        tol,
    })
}

/// Solves a f″ + b f′ + c f = 0 on `span` = (lo, hi) ∋ x0 by adaptive
/// Dormand–Prince 5(4) integration in both directions from the anchor.
pub fn fundamental_system(
    coeffs: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    x0: f64,
    span: (f64, f64),
    tol: f64,
) -> Result<FundamentalPair> {
    let (lo, hi) = span;
    if !(lo <= x0 && x0 <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain {
            at: x0,
            reason: format!("anchor outside span [{lo}, {hi}]"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParam {
            field: "tol",
            reason: format!("must be positive, got {tol}"),
        });
    }
    let coeffs: Coefficients = Arc::new(coeffs);
    let a = |x: f64| coeffs(x)[0];
    if let Some(at) = find_singularity(&a, lo, hi) {
        return Err(Error::Singularity { at });
    }
    let mut nodes: Vec<Node> = integrate_leg(&coeffs, x0, lo, tol)?;
    nodes.reverse();
    nodes.push(node(&coeffs, x0, [1.0, 0.0, 0.0, 1.0]));
    nodes.extend(integrate_leg(&coeffs, x0, hi, tol)?);
    Ok(FundamentalPair {
        anchor: x0,
        nodes,
        coeffs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::DEFAULT_TOL;
    use crate::specfun::quad::integrate_adaptive;

    #[test]
    fn free_particle() {
        let p = fundamental_system(|_| [1.0, 0.0, 0.0], 0.5, (0.0, 3.0), DEFAULT_TOL).unwrap();
        for &x in &[0.0, 0.5, 1.3, 3.0] {
            let [f1, f2] = p.eval(x).unwrap();
            assert!((f1[0] - 1.0).abs() < 1e-12 && f1[1].abs() < 1e-12);
            assert!((f2[0] - (x - 0.5)).abs() < 1e-12 && (f2[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn harmonic_oscillator() {
        let p = fundamental_system(|_| [1.0, 0.0, 1.0], 0.0, (0.0, 10.0), DEFAULT_TOL).unwrap();
        let mut worst = 0.0_f64;
        for i in 0..=1000 {
            let x = 10.0 * i as f64 / 1000.0;
            let [f1, f2] = p.eval(x).unwrap();
            worst = worst
                .max((f1[0] - x.cos()).abs())
                .max((f2[0] - x.sin()).abs())
                .max((f1[1] + x.sin()).abs())
                .max((f2[1] - x.cos()).abs());
        }
        assert!(worst <= 1e-10, "max error {worst:e}");
    }

    #[test]
    fn abel_identity() {
        let coeffs = |x: f64| [1.0 + x * x, 2.0 * x + 1.0, -3.0];
        let tol = DEFAULT_TOL;
        let p = fundamental_system(coeffs, 0.2, (-1.0, 2.0), tol).unwrap();
        for &x in &[-1.0, -0.3, 0.2, 1.0, 2.0] {
            let int = integrate_adaptive(
                |s| {
                    let [a, b, _] = coeffs(s);
                    b / a
                },
                0.2,
                x,
                1e-13,
            )
            .unwrap();
            let w = p.wronskian(x).unwrap();
            assert!((w - (-int).exp()).abs() <= 10.0 * tol, "x={x}: {w}");
        }
    }

    #[test]
    fn vanishing_leading_coefficient() {
        let r = fundamental_system(|x| [x - 0.3, 1.0, 1.0], 0.0, (0.0, 1.0), DEFAULT_TOL);
        match r {
            Err(Error::Singularity { at }) => assert!((at - 0.3).abs() < 1e-10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn outside_span_is_domain_error() {
        let p = fundamental_system(|_| [1.0, 0.0, 1.0], 0.0, (0.0, 1.0), DEFAULT_TOL).unwrap();
        assert!(matches!(p.eval(1.5), Err(Error::Domain { .. })));
    }
}
