//! Numerical kernel: Bessel functions of real order, fundamental systems of
//! linear second-order ODEs, adaptive quadrature and bracketed root finding.
//!
//! Everything here is pure and reentrant.

mod bessel;
mod constcoef;
mod gamma;
mod ode;
mod quad;
mod roots;

pub use bessel::{bessel, bessel_with_derivative, BesselKind, MAX_ARGUMENT, MAX_ORDER};
pub use constcoef::{constant_coeff_fundamental, CharacteristicRoots, ConstantCoeffPair};
pub use gamma::gamma;
pub use ode::{fundamental_system, Coefficients, FundamentalPair, SolutionPair};
pub use quad::integrate_adaptive;
pub use roots::root_bracketed;

/// Default tolerance for quadrature and ODE integration.
pub const DEFAULT_TOL: f64 = 1e-10;
