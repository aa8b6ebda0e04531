//! Smooth scalar functions of one variable with exact derivatives.
//!
//! The exact families take arbitrary functions of time (`f(t)`, `p0(t)`,
//! the `g(t)` of the pressure-gauge symmetry) and the travelling-wave family
//! takes an arbitrary porosity profile. They are supplied as closed forms so
//! that every derivative the residual forms need is exact.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarFn {
    Constant { value: f64 },
    /// `c[0] + c[1] s + c[2] s^2 + ...`
    Polynomial { coeffs: Vec<f64> },
    /// `amplitude * sin(frequency * s + phase)`
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude * exp(rate * s)`
    Exponential { amplitude: f64, rate: f64 },
    /// `offset + amplitude * tanh((s - center) / width)`
    Tanh {
        offset: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Pointwise sum of the terms.
    Sum { terms: Vec<ScalarFn> },
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn::Constant { value: 0.0 }
    }

    pub fn constant(value: f64) -> Self {
        ScalarFn::Constant { value }
    }

    pub fn sine(amplitude: f64, frequency: f64) -> Self {
        ScalarFn::Sine {
            amplitude,
            frequency,
            phase: 0.0,
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        self.derivative(s, 0)
    }

    /// `order`-th derivative at `s`. `Tanh` returns NaN above order 4; every
    /// other variant supports any order.
    pub fn derivative(&self, s: f64, order: u32) -> f64 {
        match self {
            ScalarFn::Constant { value } => {
                if order == 0 {
                    *value
                } else {
                    0.0
                }
            }
            ScalarFn::Polynomial { coeffs } => {
                let n = order as usize;
                if n >= coeffs.len() {
                    return 0.0;
                }
                // Horner on the differentiated coefficients.
                let mut acc = 0.0;
                for (i, &c) in coeffs.iter().enumerate().skip(n).rev() {
                    let falling: f64 = ((i - n + 1)..=i).map(|j| j as f64).product();
                    acc = acc * s + c * falling;
                }
                acc
            }
            ScalarFn::Sine {
                amplitude,
                frequency,
                phase,
            } => {
                let arg = frequency * s + phase + order as f64 * std::f64::consts::FRAC_PI_2;
                amplitude * frequency.powi(order as i32) * arg.sin()
            }
            ScalarFn::Exponential { amplitude, rate } => {
                amplitude * rate.powi(order as i32) * (rate * s).exp()
            }
            ScalarFn::Tanh {
                offset,
                amplitude,
                center,
                width,
            } => {
                let z = (s - center) / width;
                let th = z.tanh();
                let sech2 = 1.0 - th * th;
                let d = match order {
                    0 => return offset + amplitude * th,
                    1 => sech2,
                    2 => -2.0 * th * sech2,
                    3 => sech2 * (6.0 * th * th - 2.0),
                    4 => 8.0 * th * sech2 * (2.0 - 3.0 * th * th),
                    _ => return f64::NAN,
                };
                amplitude * d / width.powi(order as i32)
            }
            ScalarFn::Sum { terms } => terms.iter().map(|f| f.derivative(s, order)).sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: &ScalarFn, s: f64, order: u32) -> f64 {
        let h = 1e-4;
        (f.derivative(s + h, order) - f.derivative(s - h, order)) / (2.0 * h)
    }

    #[test]
    fn derivatives_match_central_differences() {
        let fns = [
            ScalarFn::Polynomial {
                coeffs: vec![1.0, -2.0, 0.5, 0.25],
            },
            ScalarFn::Sine {
                amplitude: 0.1,
                frequency: 2.0,
                phase: 0.3,
            },
            ScalarFn::Exponential {
                amplitude: 2.0,
                rate: -0.7,
            },
            ScalarFn::Tanh {
                offset: 0.6,
                amplitude: 0.1,
                center: 0.2,
                width: 0.5,
            },
            ScalarFn::Sum {
                terms: vec![ScalarFn::constant(3.0), ScalarFn::sine(1.0, 1.0)],
            },
        ];
        for f in &fns {
            for order in 0..4 {
                for &s in &[-0.4, 0.0, 0.7] {
                    let exact = f.derivative(s, order + 1);
                    assert!(
                        (exact - fd(f, s, order)).abs() < 1e-6 * exact.abs().max(1.0),
                        "{f:?} order {order} at {s}"
                    );
                }
            }
        }
    }

    #[test]
    fn polynomial_values() {
        let p = ScalarFn::Polynomial {
            coeffs: vec![1.0, 2.0, 3.0],
        };
        assert_eq!(p.value(2.0), 17.0);
        assert_eq!(p.derivative(2.0, 1), 14.0);
        assert_eq!(p.derivative(2.0, 2), 6.0);
        assert_eq!(p.derivative(2.0, 3), 0.0);
    }
}
