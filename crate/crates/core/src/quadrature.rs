//! Adaptive Gauss-Kronrod integration and fixed-grid rules.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = WGK[7] * fc;
    let mut rg = WG[3] * fc;
    for j in 0..7 {
        let dx = hw * XGK[j];
        let s = f(c - dx) + f(c + dx);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    (rk * hw, ((rk - rg) * hw).abs())
}

/// Integrates `f` over `[a, b]` by globally adaptive 7-15 point Gauss-Kronrod
/// bisection until the summed error estimate is below `max(abs_tol, rel_tol*|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut segs = vec![{
        let (v, e) = kronrod15(&f, a, b);
        (a, b, v, e)
    }];
    for _ in 0..2000 {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return total;
        }
        let (k, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.3.total_cmp(&y.1.3))
            .expect("non-empty");
        let (lo, hi, _, _) = segs.swap_remove(k);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            segs.push((lo, hi, kronrod15(&f, lo, hi).0, 0.0));
            continue;
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
    segs.iter().map(|s| s.2).sum()
}

/// Composite Simpson weights for `n` equispaced nodes with step `d`.
/// An odd interval count closes with the 3/8 rule on the last three intervals.
pub fn simpson_weights(n: usize, d: f64) -> Vec<f64> {
    assert!(n >= 4, "need at least four nodes");
    let mut w = vec![0.0; n];
    let m = n - 1;
    let ms = if m % 2 == 1 {
        for (k, c) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
            w[n - 4 + k] += c * 3.0 * d / 8.0;
        }
        m - 3
    } else {
        m
    };
    for i in (0..ms).step_by(2) {
        w[i] += d / 3.0;
        w[i + 1] += 4.0 * d / 3.0;
        w[i + 2] += d / 3.0;
    }
    w
}

/// Fourth-order cumulative integral of equispaced samples: `c[i] = int_{x_0}^{x_i} g`.
pub fn cumulative(g: &[f64], d: f64) -> Vec<f64> {
    let n = g.len();
    assert!(n >= 4, "need at least four nodes");
    let mut c = vec![0.0; n];
    for i in 0..n - 1 {
        let seg = if i == 0 {
            d / 24.0 * (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3])
        } else if i == n - 2 {
            d / 24.0 * (9.0 * g[n - 1] + 19.0 * g[n - 2] - 5.0 * g[n - 3] + g[n - 4])
        } else {
            d / 24.0 * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2])
        };
        c[i + 1] = c[i] + seg;
    }
    c
}

/// Estimate of `int_0^{r0} g(r) dr` assuming `g ~ c r^p` below the first two samples.
pub fn power_head(r0: f64, g0: f64, r1: f64, g1: f64) -> f64 {
    if g0 == 0.0 || g1 == 0.0 || g0.signum() != g1.signum() {
        return 0.0;
    }
    let p = (g1 / g0).ln() / (r1 / r0).ln();
    if p <= -1.0 {
        return 0.0;
    }
    r0 * g0 / (p + 1.0)
}
