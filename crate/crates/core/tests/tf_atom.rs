use scottlab::phase_space::{LawKind, PressureLaw};
use scottlab::tf_atom::{
    solve_tf_atom, solve_universal_tf, tf_energy, universal_energy_constant, universal_length, Mixing, RadialGrid, TfOptions,
};

/// Independent shooting: Taylor start at small x, then classical RK4 in x with
/// a fixed step, and bisection on the slope. Different variables and integrator
/// from the library version.
fn oracle_slope() -> f64 {
    let shoot = |s: f64| -> i32 {
        let x0: f64 = 1e-6;
        let mut x = x0;
        let mut y = 1.0 + s * x0 + 4.0 / 3.0 * x0.powf(1.5);
        let mut v = s + 2.0 * x0.sqrt();
        let f = |x: f64, y: f64| y.max(0.0).powf(1.5) / x.sqrt();
        let mut h = 1e-8;
        while x < 60.0 {
            let k1 = (v, f(x, y));
            let k2 = (v + 0.5 * h * k1.1, f(x + 0.5 * h, y + 0.5 * h * k1.0));
            let k3 = (v + 0.5 * h * k2.1, f(x + 0.5 * h, y + 0.5 * h * k2.0));
            let k4 = (v + h * k3.1, f(x + h, y + h * k3.0));
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            v += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            x += h;
            h = (5e-3 * x).min(1e-3);
            if y < 0.0 {
                return -1;
            }
            if v > 0.0 {
                return 1;
            }
        }
        0
    };
    let (mut lo, mut hi) = (-1.7, -1.5);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        match shoot(m) {
            -1 => lo = m,
            1 => hi = m,
            _ => return m,
        }
    }
    0.5 * (lo + hi)
}

fn neutral(z: f64) -> scottlab::tf_atom::TfSolution {
    solve_tf_atom(z, z, PressureLaw::nonrel(2.0, 1.0), RadialGrid::for_charge(z), &TfOptions::default()).unwrap()
}

#[test]
fn universal_slope_matches_independent_shooting() {
    let lib = solve_universal_tf(100.0, 2e-3).unwrap();
    let ora = oracle_slope();
    assert!((lib.slope - ora).abs() < 1e-6, "{} vs {}", lib.slope, ora);
    assert!((lib.slope + 1.588071).abs() < 1e-6);
}

#[test]
fn universal_slope_stable_across_steps() {
    let a = solve_universal_tf(100.0, 4e-3).unwrap().slope;
    let b = solve_universal_tf(100.0, 1e-3).unwrap().slope;
    assert!((a - b).abs() < 1e-6);
}

#[test]
fn neutral_hydrogen_matches_universal_constant() {
    let sol = neutral(1.0);
    assert_eq!(sol.nu, 0.0);
    assert!((sol.electrons - 1.0).abs() < 1e-6, "N = {}", sol.electrons);
    let c = universal_energy_constant(oracle_slope());
    let rel = (sol.energy.total - c) / c;
    assert!(rel.abs() < 1e-4, "E = {} vs {}", sol.energy.total, c);
    let dual = (sol.energy.total - sol.energy.dual) / sol.energy.total;
    assert!(dual.abs() < 1e-4);
}

#[test]
fn potential_matches_universal_profile() {
    let u = solve_universal_tf(100.0, 2e-3).unwrap();
    let sol = neutral(1.0);
    let b = universal_length(1.0);
    for &x in &[0.1, 1.0, 5.0] {
        let k = u.x.iter().position(|&xi| xi >= x).unwrap();
        let phi = u.phi[k] + (u.phi[k] - u.phi[k - 1]) / (u.x[k] - u.x[k - 1]) * (x - u.x[k]);
        let r = x * b;
        let w: Vec<f64> = sol.grid.r.iter().zip(&sol.w).map(|(r, w)| r * w).collect();
        let rw = sol.grid.interpolate(&w, r);
        assert!((rw - phi).abs() < 1e-4, "x={x}: {rw} vs {phi}");
    }
}

#[test]
fn seven_thirds_scaling() {
    let e1 = neutral(1.0).energy.total;
    let e10 = neutral(10.0).energy.total;
    let ratio = e10 / e1;
    assert!((ratio / 10f64.powf(7.0 / 3.0) - 1.0).abs() < 1e-3);
}

#[test]
fn virial_relation() {
    let e = neutral(10.0).energy;
    assert!(((e.kinetic + e.total) / e.total).abs() < 1e-2);
    assert!(((e.attraction + e.repulsion + 2.0 * e.kinetic) / e.kinetic).abs() < 1e-2);
}

#[test]
fn refinement_reduces_residual() {
    let z = 1.0;
    let (lo, hi) = (1e-6, 2000.0);
    let reference = RadialGrid::log(lo, hi, 4001);
    let run = |n| {
        solve_tf_atom(z, z, PressureLaw::nonrel(2.0, 1.0), RadialGrid::log(lo, hi, n), &TfOptions::default())
            .unwrap()
            .residual_on(&reference)
    };
    let coarse = run(500);
    let fine = run(1000);
    assert!(fine * 2.0 <= coarse, "{coarse} -> {fine}");
}

#[test]
fn nu_nonincreasing_in_n() {
    let nus: Vec<f64> = [0.3, 0.6, 0.9]
        .iter()
        .map(|&n| {
            solve_tf_atom(1.0, n, PressureLaw::nonrel(2.0, 1.0), RadialGrid::for_charge(1.0), &TfOptions::default())
                .unwrap()
                .nu
        })
        .collect();
    assert!(nus[0] < nus[1] && nus[1] < nus[2], "{nus:?}");
}

#[test]
fn empty_density_has_zero_energy() {
    let mut sol = neutral(1.0);
    sol.w.iter_mut().for_each(|w| *w = -1.0);
    sol.nu = 0.0;
    let e = tf_energy(&sol);
    assert_eq!(e.total, 0.0);
    assert_eq!(e.dual, 0.0);
}

#[test]
fn stored_energy_is_reproducible() {
    let sol = neutral(1.0);
    assert_eq!(tf_energy(&sol), sol.energy);
}

#[test]
fn relativistic_law_lowers_energy() {
    let nr = neutral(10.0).energy.total;
    let law = PressureLaw::atomic(LawKind::Rel, 0.05);
    let rel = solve_tf_atom(10.0, 10.0, law, RadialGrid::for_charge(10.0), &TfOptions::default()).unwrap();
    assert!(rel.energy.total < nr);
    assert!((rel.electrons - 10.0).abs() < 1e-5);
}

#[test]
fn alternative_mixers_agree_when_they_converge() {
    let base = neutral(1.0).energy.total;
    let opts = TfOptions { mixing: Mixing::Anderson { depth: 10, factor: 0.3 }, max_iter: 2000, ..Default::default() };
    if let Ok(sol) = solve_tf_atom(1.0, 0.5, PressureLaw::nonrel(2.0, 1.0), RadialGrid::for_charge(1.0), &opts) {
        let newton =
            solve_tf_atom(1.0, 0.5, PressureLaw::nonrel(2.0, 1.0), RadialGrid::for_charge(1.0), &TfOptions::default())
                .unwrap();
        assert!((sol.energy.total - newton.energy.total).abs() < 1e-6);
    }
    assert!(base < 0.0);
}
