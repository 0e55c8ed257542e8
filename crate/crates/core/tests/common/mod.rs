#![allow(dead_code)]

/// Composite 5-point Gauss-Legendre on `[a, b]`.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let c = a + (k as f64 + 0.5) * h;
            (0..5).map(|i| W[i] * f(c + 0.5 * h * X[i])).sum::<f64>()
        })
        .sum::<f64>()
        * 0.5
        * h
}

/// Density and pressure of the spin-2 Fermi gas from the momentum integral,
/// with dispersion `p^2/2` (`g = None`) or `sqrt(g^-2 p^2 + g^-4) - g^-2`.
pub fn fermi_gas(w: f64, g: Option<f64>) -> (f64, f64) {
    let pf = match g {
        None => (2.0 * w).sqrt(),
        Some(g) => (w * w * g * g + 2.0 * w).sqrt(),
    };
    let t = |p: f64| match g {
        None => 0.5 * p * p,
        Some(g) => p * p / (1.0 + (1.0 + g * g * p * p).sqrt()),
    };
    let c = 1.0 / (std::f64::consts::PI * std::f64::consts::PI);
    (c * pf.powi(3) / 3.0, c * gauss_legendre(|p| (w - t(p)) * p * p, 0.0, pf, 200))
}

pub fn log_grid() -> Vec<f64> {
    (0..60).map(|k| 1e-3 * 10f64.powf(6.0 * k as f64 / 59.0)).collect()
}

/// Second implementation of the remainder formulas, written with explicit
/// exponentials and logarithms.
pub fn reference_remainders(h: f64, a: f64, kappa: f64) -> (f64, f64) {
    let lk = if kappa > 0.0 { kappa * (-kappa.ln()).abs().powf(1.0 / 3.0) } else { 0.0 };
    let hm43 = (-4.0 / 3.0 * h.ln()).exp();
    let r1 = if a < 1.0 {
        (-0.5 * a.ln() - h.ln()).exp() + lk * (-a.ln() / 3.0).exp() * hm43
    } else {
        h.recip() + lk * hm43
    };
    let threshold = (-h.ln()).powf(1.0 / 3.0);
    let r2 = if a < threshold {
        kappa * (-2.0 * h.ln()).exp() / (2.0 * h.ln() - a.ln()).abs()
    } else {
        kappa * (-2.0 * h.ln() - 3.0 * a.ln()).exp()
    };
    (r1, r2)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
