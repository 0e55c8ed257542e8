use std::f64::consts::FRAC_2_PI;

use proptest::prelude::*;
use scottlab::params::{atomic_rescale, local_rescale, validate, validate_system, PhysicalSystem, Thresholds};

fn molecule(z: Vec<f64>, spread: f64, alpha: f64, beta: f64) -> PhysicalSystem {
    let y = (0..z.len()).map(|k| [k as f64 * spread, 0.5 * k as f64, 0.0]).collect();
    let n = z.iter().sum();
    PhysicalSystem { z, y, n, alpha, beta, q: 2 }
}

proptest! {
    #[test]
    fn rescale_roundtrip(z in prop::collection::vec(1.0f64..100.0, 1..4), spread in 0.1f64..5.0,
                         alpha in 0.0f64..1e-3, beta in 0.0f64..5e-3) {
        let sys = molecule(z, spread, alpha, beta);
        let reg = atomic_rescale(&sys);
        let (zs, a, b, d) = reg.unscale();
        for (x, y) in zs.iter().zip(&sys.z) {
            prop_assert!((x - y).abs() <= 1e-12 * y);
        }
        prop_assert!((a - alpha).abs() <= 1e-12 * alpha.max(1e-300));
        prop_assert!((b - beta).abs() <= 1e-12 * beta.max(1e-300));
        if sys.z.len() > 1 {
            prop_assert!((d - sys.min_distance()).abs() <= 1e-12 * d);
        }
        prop_assert!((reg.h.powi(3) * sys.z_max() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_matches_conditions(z in prop::collection::vec(1.0f64..120.0, 1..4),
                                     alpha in 0.0f64..2e-3, beta in 0.0f64..1e-2) {
        let sys = molecule(z, 1.0, alpha, beta);
        let th = Thresholds::default();
        let expected = sys.z.iter().all(|&zm| {
            let sub = zm * beta < FRAC_2_PI - th.eps;
            let cap = th.kappa_star * (FRAC_2_PI - zm * beta).max(0.0).powf(1.5);
            sub && alpha * zm <= cap
        });
        let report = validate_system(&sys, th).unwrap();
        prop_assert_eq!(report.passed(), expected);
        for c in &report.conditions {
            prop_assert_eq!(c.passed, if c.name == "coupling" { c.margin >= 0.0 } else { c.margin > 0.0 });
        }
        match validate(&sys, th) {
            Ok(_) => prop_assert!(expected),
            Err(e) => {
                prop_assert!(!expected);
                prop_assert_eq!(e.exit_code(), 2);
            }
        }
    }

    #[test]
    fn local_penalty_is_ell_over_alpha(z in 1.0f64..1e4, ell in 1e-4f64..1.0, alpha in 1e-6f64..1e-2) {
        let sys = PhysicalSystem::atom(z, z, alpha, 0.0);
        let loc = local_rescale(&sys, ell, 1.0).unwrap();
        prop_assert!((loc.penalty - ell / alpha).abs() <= 1e-12 * ell / alpha);
        prop_assert!((loc.h_loc * loc.h_loc * z * ell - 1.0).abs() < 1e-12);
        prop_assert!((loc.varsigma - loc.kappa_loc * loc.h_loc).abs() <= 1e-15 * loc.varsigma.max(1e-300));
    }

    #[test]
    fn local_gamma_bounded(z in 1.0f64..1e4, ell in 1e-4f64..1.0, beta in 0.0f64..1e-2) {
        let sys = PhysicalSystem::atom(z, z, 0.0, beta);
        match local_rescale(&sys, ell, 1.0) {
            Ok(loc) => prop_assert!(loc.gamma_loc <= 1.0 + 1e-15),
            Err(_) => prop_assert!(beta * (z * ell).sqrt() > 1.0),
        }
    }
}
