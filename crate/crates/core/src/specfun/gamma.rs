//! Gamma function pieces needed by the Bessel kernel.

/// Taylor coefficients of 1/Γ(1+z) about z = 0.
const RGAMMA1P: [f64; 29] = [
    1.0,
    5.772156649015328606065e-1,
    -6.55878071520253881077e-1,
    -4.2002635034095235529e-2,
    1.665386113822914895017e-1,
    -4.219773455554433674821e-2,
    -9.621971527876973562115e-3,
    7.218943246663099542395e-3,
    -1.165167591859065112114e-3,
    -2.152416741149509728157e-4,
    1.280502823881161861532e-4,
    -2.013485478078823865569e-5,
    -1.250493482142670657345e-6,
    1.133027231981695882374e-6,
    -2.05633841697760710345e-7,
    6.116095104481415817862e-9,
    5.002007644469222930056e-9,
    -1.181274570487020144588e-9,
    1.043426711691100510492e-10,
    7.78226343990507125405e-12,
    -3.696805618642205708188e-12,
    5.100370287454475979015e-13,
    -2.058326053566506783222e-14,
    -5.34812253942301798237e-15,
    1.226778628238260790159e-15,
    -1.181259301697458769514e-16,
    1.18669225475160033258e-18,
    1.412380655318031781556e-18,
    -2.298745684435370206592e-19,
];

/// 1/Γ(1+z) for |z| ≤ 1/2 (accurate somewhat beyond).
pub fn rgamma1p(z: f64) -> f64 {
    RGAMMA1P.iter().rev().fold(0.0, |acc, &c| acc * z + c)
}

/// Γ(x) for x > 0 by reduction to 1/Γ(1+z), |z| ≤ 1/2.
pub fn gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut x = x;
    let mut scale = 1.0;
    while x > 1.5 {
        x -= 1.0;
        scale *= x;
    }
    while x < 0.5 {
        scale /= x;
        x += 1.0;
    }
    scale / rgamma1p(x - 1.0)
}

/// Temme's auxiliary quantities for |μ| ≤ 1/2:
/// γ₁ = (1/Γ(1−μ) − 1/Γ(1+μ)) / 2μ,  γ₂ = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2,
/// together with 1/Γ(1+μ) and 1/Γ(1−μ).
pub fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let gampl = rgamma1p(mu);
    let gammi = rgamma1p(-mu);
    // Odd part of the series divided by μ, without cancellation.
    let mut gam1 = 0.0;
    for k in (1..RGAMMA1P.len()).step_by(2).rev() {
        gam1 = gam1 * mu * mu + RGAMMA1P[k];
    }
    (-gam1, 0.5 * (gammi + gampl), gampl, gammi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_and_half_integers() {
        for (n, f) in [(1.0, 1.0), (2.0, 1.0), (3.0, 2.0), (5.0, 24.0), (11.0, 3628800.0)] {
            assert!((gamma(n) / f - 1.0).abs() < 1e-14, "Gamma({n})");
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert!((gamma(0.5) / sqrt_pi - 1.0).abs() < 1e-14);
        assert!((gamma(2.5) / (0.75 * sqrt_pi) - 1.0).abs() < 1e-14);
        // Γ(1/3) from mpmath
        assert!((gamma(1.0 / 3.0) / 2.678938534707747633 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn temme_gam1_matches_difference_quotient() {
        for &mu in &[0.5, 0.3, -0.2, 0.01] {
            let (g1, g2, gp, gm) = temme_gammas(mu);
            assert!((g1 - (gm - gp) / (2.0 * mu)).abs() < 1e-12);
            assert!((g2 - 0.5 * (gm + gp)).abs() < 1e-15);
        }
        let euler = 0.5772156649015329;
        assert!((temme_gammas(0.0).0 + euler).abs() < 1e-16);
    }
}
