//! Seeded property tests of the invariants that hold for any input.

use std::sync::Arc;

use porolab::families::{family68_build, Family68Params};
use porolab::model::{from_effective, residual_original, residual_starred, to_effective, Jet};
use porolab::scenario::{Example1Task, OrbitTask, Scenario, Task};
use porolab::solver::{convergence_order, DerivativeSource, Grid};
use porolab::specfun::{bessel_with_derivative, BesselKind};
use porolab::symmetry::{apply_generator, orbit_residual_test, row_params, GeneratorTag, SymmetryGenerator};
use porolab::{FieldSolution, ModelParams, PressureKind, ScalarFn, StateJet, Variant};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0),
        failure_persistence: None,
        ..Config::default()
    }
}

fn params() -> impl Strategy<Value = ModelParams> {
    (
        (0.1..2.0, 1.0..100.0, -5.0..5.0, 0.0..0.9, 0.1..20.0),
        (0.0..1.0, 0.0..1.0, 0.0..1.0, 0.0..1.0, 0.0..2.0, 0.0..2.0),
        (0.0..0.5, 0.0..0.5, 0.0..1.0, 0.5..2.0),
    )
        .prop_map(|((k, lambda_star, kappa, alpha, rt), (sigma1, sigma2, s1, s2, d1, d2), (gamma0, gamma1, gamma2, rho_f0))| {
            ModelParams {
                k,
                lambda_star,
                kappa,
                alpha,
                rt,
                sigma1,
                sigma2,
                s1,
                s2,
                d1,
                d2,
                gamma0,
                gamma1,
                gamma2,
                rho_f0,
            }
        })
}

fn jet(lo: f64, hi: f64) -> impl Strategy<Value = Jet> {
    (lo..hi, prop::array::uniform5(-1.0..1.0f64)).prop_map(|(v, d)| Jet {
        v,
        t: d[0],
        x: d[1],
        tt: d[2],
        tx: d[3],
        xx: d[4],
    })
}

fn hydrostatic_jet() -> impl Strategy<Value = StateJet> {
    (jet(-1.0, 1.0), jet(0.5, 2.0), jet(-5.0, 5.0), jet(0.1, 0.9), jet(0.0, 2.0), jet(0.0, 2.0)).prop_map(
        |(u, rho, pressure, theta_f, c1, c2)| StateJet {
            pressure_kind: PressureKind::Hydrostatic,
            u,
            rho,
            pressure,
            theta_f,
            c1,
            c2,
        },
    )
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn family68(p: &ModelParams) -> Arc<dyn FieldSolution> {
    let fp = Family68Params {
        u1: 0.3,
        u2: 0.2,
        w1: 1.5,
        w2: 0.7,
        f: ScalarFn::sine(0.1, 1.0),
        p0: ScalarFn::sine(0.5, 2.0),
        ..Family68Params::default()
    };
    Arc::new(family68_build(p, fp, Variant::Corrected).unwrap())
}

fn generator(tag: GeneratorTag, eps: f64) -> SymmetryGenerator {
    match tag {
        GeneratorTag::X4 => SymmetryGenerator::x4(eps, ScalarFn::sine(1.0, 1.0)),
        _ => SymmetryGenerator::new(tag, eps),
    }
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn pressure_transform_round_trips(p in params(), h in hydrostatic_jet()) {
        let back = from_effective(&to_effective(&h, &p).unwrap(), &p).unwrap();
        for (a, b) in [(h.pressure, back.pressure), (h.c1, back.c1), (h.u, back.u)] {
            for (x, y) in [(a.v, b.v), (a.t, b.t), (a.x, b.x), (a.tt, b.tt), (a.tx, b.tx), (a.xx, b.xx)] {
                prop_assert!(close(x, y, 1e-12), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn residual_forms_agree(p in params(), h in hydrostatic_jet()) {
        let ro = residual_original(&h, &p).unwrap();
        let rs = residual_starred(&to_effective(&h, &p).unwrap(), &p).unwrap();
        for k in 0..6 {
            prop_assert!(close(ro[k], rs[k], 1e-12), "r{}: {} vs {}", k + 1, ro[k], rs[k]);
        }
    }

    #[test]
    fn flows_compose_additively(
        tag in prop::sample::select(GeneratorTag::ALL.to_vec()),
        e1 in -0.2..0.2f64,
        e2 in -0.2..0.2f64,
        t in 0.3..0.7f64,
        x in 0.3..0.7f64,
    ) {
        let p = row_params(6).unwrap();
        let sol = family68(&p);
        let twice = apply_generator(sol.clone(), generator(tag, e1), &p, false).unwrap();
        let twice = apply_generator(Arc::new(twice), generator(tag, e2), &p, false).unwrap();
        let once = apply_generator(sol.clone(), generator(tag, e1 + e2), &p, false).unwrap();
        let back = apply_generator(Arc::new(once), generator(tag, -(e1 + e2)), &p, false).unwrap();
        let once = apply_generator(sol.clone(), generator(tag, e1 + e2), &p, false).unwrap();
        let (a, b) = (twice.fields(t, x).to_array(), once.fields(t, x).to_array());
        let (c, d) = (back.fields(t, x).to_array(), sol.fields(t, x).to_array());
        for k in 0..6 {
            prop_assert!(close(a[k], b[k], 1e-12), "{tag} composition, field {k}");
            prop_assert!(close(c[k], d[k], 1e-12), "{tag} inverse, field {k}");
        }
    }

    #[test]
    fn admitted_flows_preserve_residuals(
        row in 1u8..=6,
        tag in prop::sample::select(GeneratorTag::ALL.to_vec()),
        eps in -0.3..0.3f64,
    ) {
        let p = ModelParams { kappa: 0.0, ..row_params(row).unwrap() };
        let grid = Grid::new((0.35, 0.65), 5, (0.35, 0.65), 3).unwrap();
        let r = orbit_residual_test(family68(&p), generator(tag, eps), &grid, &p, DerivativeSource::Analytic).unwrap();
        if r.admitted {
            prop_assert!(r.pass, "{tag}({eps}) row {row}: {r:?}");
        }
    }

    #[test]
    fn bessel_wronskians(nu in 0.0..5.0f64, x in 0.1..30.0f64) {
        let (j, jp) = bessel_with_derivative(BesselKind::J, nu, x).unwrap();
        let (y, yp) = bessel_with_derivative(BesselKind::Y, nu, x).unwrap();
        let w = j * yp - jp * y;
        prop_assert!((w - 2.0 / (std::f64::consts::PI * x)).abs() <= 1e-9 * (1.0 + w.abs()), "J,Y at ({nu}, {x}): {w}");
        let x = x.min(20.0);
        let (i, ip) = bessel_with_derivative(BesselKind::I, nu, x).unwrap();
        let (k, kp) = bessel_with_derivative(BesselKind::K, nu, x).unwrap();
        let w = i * kp - ip * k;
        prop_assert!((w + 1.0 / x).abs() <= 1e-9 * (1.0 / x), "I,K at ({nu}, {x}): {w}");
    }

    #[test]
    fn observed_order_recovers_power_laws(c in 0.01..100.0f64, p in 0.5..4.0f64, h0 in 0.01..0.5f64) {
        let pairs: Vec<(f64, f64)> = (0..4).map(|i| {
            let h = h0 / 2f64.powi(i);
            (h, c * h.powf(p))
        }).collect();
        for o in convergence_order(&pairs).unwrap() {
            prop_assert!((o - p).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn scenarios_round_trip(
        p in params(),
        seed in any::<u64>(),
        kappas in prop::collection::vec(-100.0..100.0f64, 1..5),
        eps in -0.5..0.5f64,
        which in any::<bool>(),
    ) {
        let task = if which {
            Task::Example1(Example1Task { kappas, lambda_stars: vec![100.0, 700.0], nx: 11 })
        } else {
            Task::Orbit(OrbitTask { epsilon: eps, ..OrbitTask::default() })
        };
        let s = Scenario { version: 1, name: "round-trip".into(), params: p, seed, task };
        s.validate().unwrap();
        let back = Scenario::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
