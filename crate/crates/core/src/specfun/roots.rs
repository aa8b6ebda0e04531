//! Safeguarded root finding on a bracket (Brent's method).

use crate::{Error, Result};

const MAX_ITER: usize = 200;

/// Root of `f` in [lo, hi], returned once |f| ≤ tol or the bracket is no
/// wider than tol.
pub fn root_bracketed(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..MAX_ITER {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if fb.abs() <= tol || xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear() {
        let r = root_bracketed(|x| x - 0.5, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cosine() {
        let r = root_bracketed(f64::cos, 0.0, 3.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            root_bracketed(|x| x * x + 1.0, 0.0, 1.0, 1e-12),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn root_at_endpoint() {
        assert_eq!(root_bracketed(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }
}
