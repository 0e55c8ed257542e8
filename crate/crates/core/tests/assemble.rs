mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scottlab::assemble::{
    assemble_energy, atom_terms, atomic_tf, bounds_report, remainder_terms, AtomTf, BoundConstants, Coefficients,
    DistanceBranch, Provenance, ScottEntry, ScottTable,
};
use scottlab::error::LabError;
use scottlab::params::PhysicalSystem;

use common::reference_remainders;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn remainders_match_second_implementation() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let h: f64 = 10f64.powf(rng.random_range(-3.0..-0.3));
        let a = h * h * 10f64.powf(rng.random_range(0.0..8.0));
        let kappa = 10f64.powf(rng.random_range(-4.0..-0.5));
        let (r1, r2) = remainder_terms(h, a, kappa).unwrap();
        let (q1, q2) = reference_remainders(h, a, kappa);
        assert!(close(r1, q1, 1e-12), "R1 h={h} a={a} k={kappa}: {r1} vs {q1}");
        assert!(close(r2, q2, 1e-12), "R2 h={h} a={a} k={kappa}: {r2} vs {q2}");
    }
}

#[test]
fn remainder_examples() {
    let (r1, _) = remainder_terms(0.1, 2.0, 0.01).unwrap();
    assert!(close(r1, 10.0 + 0.01 * 0.01f64.ln().abs().cbrt() * 0.1f64.powf(-4.0 / 3.0), 1e-15));
    let (r1, _) = remainder_terms(0.1, 0.5, 0.01).unwrap();
    let expect = 0.5f64.powf(-0.5) * 10.0 + 0.01 * 4.605170185988091f64.cbrt() * 0.5f64.powf(-1.0 / 3.0) * 0.1f64.powf(-4.0 / 3.0);
    assert!(close(r1, expect, 1e-14));
    let (_, r2) = remainder_terms(0.1, 3.0, 0.01).unwrap();
    assert!(close(r2, 0.01 * 100.0 / 27.0, 1e-15));
    let (r1, r2) = remainder_terms(0.1, 0.5, 0.0).unwrap();
    assert!(close(r1, 0.5f64.powf(-0.5) * 10.0, 1e-15));
    assert_eq!(r2, 0.0);
    assert!(matches!(remainder_terms(0.1, 0.005, 0.01), Err(LabError::RegimeViolation { .. })));
    let (_, r2) = remainder_terms(0.1, f64::INFINITY, 0.01).unwrap();
    assert_eq!(r2, 0.0);
}

fn table() -> ScottTable {
    ScottTable {
        entries: vec![
            ScottEntry { kappa_arg: 0.0, beta_arg: 0.0, s: 0.25, err: 0.01 },
            ScottEntry { kappa_arg: 0.0, beta_arg: 0.1, s: 0.24, err: 0.02 },
            ScottEntry { kappa_arg: 0.1, beta_arg: 0.0, s: 0.23, err: 0.01 },
            ScottEntry { kappa_arg: 0.1, beta_arg: 0.1, s: 0.21, err: 0.01 },
        ],
    }
}

fn fake_atom(z: f64) -> AtomTf {
    AtomTf { z, energy: -0.7687 * z.powf(7.0 / 3.0), rho_43: 0.3 * z.powf(5.0 / 3.0), rct: 0.01 * z }
}

#[test]
fn total_is_left_to_right_sum() {
    let sys = PhysicalSystem::atom(1.0, 1.0, 0.0, 0.0);
    let b = assemble_energy(&sys, &[fake_atom(1.0)], 0.0, &table(), &Coefficients::standard()).unwrap();
    assert_eq!(b.total.to_bits(), ((((b.e_tf + b.scott_sum) + b.dirac) + b.schwinger) + b.rct).to_bits());
    assert_eq!(b.scott_sum, 2.0 * 0.25);
    assert!(!b.interpolated);
    assert!(b.remainder_r1 >= 0.0 && b.remainder_r2 >= 0.0);
}

#[test]
fn corrections_switched_off() {
    let sys = PhysicalSystem::atom(1.0, 1.0, 0.0, 0.0);
    let b = assemble_energy(&sys, &[fake_atom(1.0)], 0.0, &table(), &Coefficients::off()).unwrap();
    assert_eq!(b.total, b.e_tf + b.scott_sum);
    assert_eq!((b.dirac, b.schwinger, b.rct), (0.0, 0.0, 0.0));
}

#[test]
fn unset_coefficient_is_an_error() {
    let sys = PhysicalSystem::atom(1.0, 1.0, 0.0, 0.0);
    let coeffs = Coefficients { schwinger: None, ..Coefficients::standard() };
    assert!(matches!(
        assemble_energy(&sys, &[fake_atom(1.0)], 0.0, &table(), &coeffs),
        Err(LabError::CoefficientUnset("schwinger"))
    ));
}

#[test]
fn scott_lookup_flags_interpolation() {
    let t = table();
    assert_eq!(t.lookup(0.0, 0.1).unwrap().provenance, Provenance::Computed);
    let mid = t.lookup(0.0, 0.05).unwrap();
    assert_eq!(mid.provenance, Provenance::Interpolated);
    assert!(close(mid.s, 0.245, 1e-14));
    let cell = t.lookup(0.05, 0.05).unwrap();
    assert!(close(cell.s, 0.25 * (0.25 + 0.24 + 0.23 + 0.21), 1e-14));
    assert!(matches!(t.lookup(0.0, 0.3), Err(LabError::MissingScottEntry { .. })));

    let sys = PhysicalSystem::atom(1.0, 1.0, 0.0, 0.05);
    let b = assemble_energy(&sys, &[fake_atom(1.0)], 0.0, &t, &Coefficients::off()).unwrap();
    assert!(b.interpolated);
}

#[test]
fn separated_pair_is_twice_the_atom() {
    let z = 2.0;
    let atom = PhysicalSystem::atom(z, z, 0.0, 0.0);
    let pair = PhysicalSystem { z: vec![z, z], y: vec![[0.0; 3], [1e6, 0.0, 0.0]], n: 2.0 * z, alpha: 0.0, beta: 0.0, q: 2 };
    let one = atomic_tf(&atom).unwrap();
    let two = atomic_tf(&pair).unwrap();
    let coeffs = Coefficients::standard();
    let a1: Vec<_> = one.iter().map(|s| atom_terms(s, 0.0, coeffs.counterterm)).collect();
    let a2: Vec<_> = two.iter().map(|s| atom_terms(s, 0.0, coeffs.counterterm)).collect();
    let b1 = assemble_energy(&atom, &a1, 0.0, &table(), &coeffs).unwrap();
    let b2 = assemble_energy(&pair, &a2, 0.0, &table(), &coeffs).unwrap();
    assert!(close(b2.e_tf, 2.0 * b1.e_tf, 1e-12));
    assert!(close(b2.scott_sum, 4.0 * z * z * 0.25, 1e-15));
    assert!(close(b2.dirac, 2.0 * b1.dirac, 1e-12));
}

#[test]
fn rct_vanishes_without_relativity() {
    let sys = PhysicalSystem::atom(3.0, 3.0, 0.0, 0.0);
    let sol = atomic_tf(&sys).unwrap();
    assert_eq!(atom_terms(&sol[0], 0.0, Coefficients::standard().counterterm).rct, 0.0);
    assert!(atom_terms(&sol[0], 0.01, Coefficients::standard().counterterm).rct.is_finite());
}

#[test]
fn bound_examples() {
    let k = BoundConstants { c: 1.0, ..BoundConstants::default() };
    let neutral = PhysicalSystem::atom(1e6, 1e6, 0.0, 0.0);
    let r = bounds_report(&neutral, &k);
    assert_eq!(r.excess_charge_actual, 0.0);
    let close_pair = PhysicalSystem { z: vec![5e5, 5e5], y: vec![[0.0; 3], [1e-3, 0.0, 0.0]], n: 1e6, alpha: 0.0, beta: 0.0, q: 2 };
    let r = bounds_report(&close_pair, &k);
    assert_eq!(r.branch, DistanceBranch::Close);
    assert!(close(r.excess_charge, 10f64.powf(30.0 / 7.0), 1e-12));

    let z: f64 = 8.0;
    let edge = z.powf(-1.0 / 3.0);
    let pair = |d: f64| PhysicalSystem { z: vec![4.0, 4.0], y: vec![[0.0; 3], [d, 0.0, 0.0]], n: 8.0, alpha: 0.0, beta: 0.0, q: 2 };
    assert_eq!(bounds_report(&pair(edge), &k).branch, DistanceBranch::Close);
    assert_eq!(bounds_report(&pair(edge * (1.0 + 1e-12)), &k).branch, DistanceBranch::Separated);
    assert!(!bounds_report(&pair(1.0), &k).warnings.is_empty());
}
