//! Self-consistent Thomas-Fermi atom on a logarithmic radial grid.
//!
//! The unknown is `u = r W(r)`, so the nuclear singularity is absorbed and the
//! Poisson solve reduces to two cumulative integrals in `t = ln r`.

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{LabError, Result};
use crate::phase_space::{LawKind, PressureLaw};
use crate::quadrature::{cumulative, power_head, simpson_weights};

#[derive(Clone, Debug, Serialize)]
pub struct RadialGrid {
    pub r: Vec<f64>,
    /// Weights for `int f dr`.
    pub weights: Vec<f64>,
    /// Step in `ln r`.
    pub delta: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl RadialGrid {
    pub fn log(r_min: f64, r_max: f64, n: usize) -> Self {
        assert!(r_min > 0.0 && r_max > r_min && n >= 8);
        let t0 = r_min.ln();
        let delta = (r_max.ln() - t0) / (n - 1) as f64;
        let r: Vec<f64> = (0..n).map(|i| (t0 + i as f64 * delta).exp()).collect();
        let weights = simpson_weights(n, delta)
            .into_iter()
            .zip(&r)
            .map(|(w, r)| w * r)
            .collect();
        RadialGrid { r, weights, delta, r_min, r_max }
    }

    /// 2000 nodes on `[1e-6/Z, 2000 Z^{-1/3}]`.
    pub fn for_charge(z: f64) -> Self {
        Self::log(1e-6 / z, 2000.0 * z.powf(-1.0 / 3.0), 2000)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `int f d^3x` for a radial function, including the `[0, r_min]` head.
    pub fn volume_integral(&self, f: &[f64]) -> f64 {
        let body: f64 = self
            .weights
            .iter()
            .zip(f)
            .zip(&self.r)
            .map(|((w, f), r)| w * f * r * r)
            .sum();
        let (r0, r1) = (self.r[0], self.r[1]);
        4.0 * PI * (body + power_head(r0, f[0] * r0 * r0, r1, f[1] * r1 * r1))
    }

    /// Cubic Lagrange interpolation in `ln r`; clamps outside the grid.
    pub fn interpolate(&self, values: &[f64], r: f64) -> f64 {
        let n = self.len();
        let x = ((r.ln() - self.r_min.ln()) / self.delta).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).clamp(1, n - 3);
        let s = x - i as f64;
        let (a, b, c, d) = (values[i - 1], values[i], values[i + 1], values[i + 2]);
        let l0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
        let l1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
        let l2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
        let l3 = (s + 1.0) * s * (s - 1.0) / 6.0;
        a * l0 + b * l1 + c * l2 + d * l3
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Mixing {
    /// Fixed point preconditioned by the linearised screened Poisson operator.
    ScreenedNewton,
    Linear { factor: f64 },
    Anderson { depth: usize, factor: f64 },
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TfOptions {
    pub mixing: Mixing,
    /// Tolerance on `int |rho_out - rho| dx / Z`.
    pub tol: f64,
    pub max_iter: usize,
    /// Below this radius the relativistic law falls back to the non-relativistic one.
    /// Defaults to `gamma` (atomic units) when unset.
    pub matching_radius: Option<f64>,
    /// Relative tolerance on the electron count for ionised atoms.
    pub charge_tol: f64,
}

impl Default for TfOptions {
    fn default() -> Self {
        TfOptions {
            mixing: Mixing::ScreenedNewton,
            tol: 1e-8,
            max_iter: 500,
            matching_radius: None,
            charge_tol: 1e-10,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub attraction: f64,
    pub repulsion: f64,
    pub total: f64,
    /// Dual value `-int P(W + nu) - D(rho, rho) + nu N`.
    pub dual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TfSolution {
    pub z: f64,
    pub n_target: f64,
    pub law: PressureLaw,
    pub matching_radius: f64,
    #[serde(skip)]
    pub grid: RadialGrid,
    pub w: Vec<f64>,
    pub rho: Vec<f64>,
    pub nu: f64,
    pub electrons: f64,
    pub residual: f64,
    pub iterations: usize,
    pub energy: EnergyParts,
}

struct Problem<'a> {
    z: f64,
    grid: &'a RadialGrid,
    nonrel: PressureLaw,
    law: PressureLaw,
    /// Node where the relativistic law takes over; both laws are evaluated
    /// there and each side is integrated separately.
    split: Option<usize>,
}

/// Radial samples with an optional second value at the split node.
struct Field {
    v: Vec<f64>,
    right: Option<f64>,
}

impl<'a> Problem<'a> {
    fn new(z: f64, grid: &'a RadialGrid, law: PressureLaw, r0: f64) -> Self {
        let split = match law.kind {
            LawKind::NonRel => None,
            LawKind::Rel => {
                let n = grid.len();
                let k = grid.r.iter().position(|&r| r >= r0).unwrap_or(n - 1);
                Some(k.clamp(3, n - 4))
            }
        };
        Problem { z, grid, nonrel: PressureLaw::nonrel(law.q, law.h), law, split }
    }

    fn matching_radius(&self) -> f64 {
        self.split.map_or(0.0, |k| self.grid.r[k])
    }

    fn law_at(&self, i: usize) -> &PressureLaw {
        match self.split {
            Some(k) if i > k => &self.law,
            _ => &self.nonrel,
        }
    }

    fn field<F: Fn(&PressureLaw, usize) -> f64>(&self, f: F) -> Field {
        let v = (0..self.grid.len()).map(|i| f(self.law_at(i), i)).collect();
        Field { v, right: self.split.map(|k| f(&self.law, k)) }
    }

    fn densities(&self, u: &[f64], nu: f64) -> Field {
        let r = &self.grid.r;
        self.field(|law, i| law.density(u[i] / r[i] + nu))
    }

    fn pieces<'f>(&self, f: &'f Field) -> Vec<(usize, std::borrow::Cow<'f, [f64]>)> {
        match (self.split, f.right) {
            (Some(k), Some(right)) => {
                let mut rhs = f.v[k..].to_vec();
                rhs[0] = right;
                vec![(0, f.v[..=k].into()), (k, rhs.into())]
            }
            _ => vec![(0, f.v.as_slice().into())],
        }
    }

    /// `int f d^3x`, piecewise across the split.
    fn volume(&self, f: &Field) -> f64 {
        let g = self.grid;
        let mut total = 0.0;
        for (off, vals) in self.pieces(f) {
            let w = simpson_weights(vals.len(), g.delta);
            total += vals.iter().enumerate().map(|(j, v)| w[j] * v * g.r[off + j].powi(3)).sum::<f64>();
            if off == 0 {
                let (r0, r1) = (g.r[0], g.r[1]);
                total += power_head(r0, vals[0] * r0 * r0, r1, vals[1] * r1 * r1);
            }
        }
        4.0 * PI * total
    }

    /// Cumulative `int_{r_min}^{r_i} g(r) r dt`, piecewise across the split.
    fn cumulative_t(&self, f: &Field, power: i32) -> Vec<f64> {
        let g = self.grid;
        let mut out = vec![0.0; g.len()];
        let mut carry = 0.0;
        for (off, vals) in self.pieces(f) {
            let gv: Vec<f64> = vals.iter().enumerate().map(|(j, v)| v * g.r[off + j].powi(power)).collect();
            let c = cumulative(&gv, g.delta);
            for (j, cj) in c.iter().enumerate() {
                out[off + j] = carry + cj;
            }
            carry = out[off + c.len() - 1];
        }
        out
    }

    /// Returns `(Q(r), I(r))`: enclosed charge and `int_r^inf 4 pi rho s ds`.
    fn poisson(&self, rho: &Field) -> (Vec<f64>, Vec<f64>) {
        let g = self.grid;
        let four_pi = |c: Vec<f64>| c.into_iter().map(|x| 4.0 * PI * x).collect::<Vec<f64>>();
        let head = 4.0 * PI * power_head(g.r[0], rho.v[0] * g.r[0] * g.r[0], g.r[1], rho.v[1] * g.r[1] * g.r[1]);
        let q: Vec<f64> = four_pi(self.cumulative_t(rho, 3)).into_iter().map(|c| c + head).collect();
        let ci = four_pi(self.cumulative_t(rho, 2));
        let last = ci[ci.len() - 1];
        (q, ci.iter().map(|c| last - c).collect())
    }

    fn u_out(&self, rho: &Field) -> Vec<f64> {
        let (q, i) = self.poisson(rho);
        self.grid.r.iter().zip(q.iter().zip(&i)).map(|(r, (q, i))| self.z - q - r * i).collect()
    }

    fn residual(&self, rho: &Field, u_out: &[f64], nu: f64) -> f64 {
        let out = self.densities(u_out, nu);
        let diff = Field {
            v: out.v.iter().zip(&rho.v).map(|(a, b)| (a - b).abs()).collect(),
            right: out.right.zip(rho.right).map(|(a, b)| (a - b).abs()),
        };
        self.volume(&diff) / self.z
    }

    fn newton_step(&self, u: &[f64], res: &[f64], nu: f64) -> Vec<f64> {
        let g = self.grid;
        let n = g.len();
        let d = g.delta;
        let (cl, cd, cu) = (-(1.0 / (d * d) + 0.5 / d), 2.0 / (d * d), -(1.0 / (d * d) - 0.5 / d));
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        diag[0] = 1.0;
        rhs[0] = res[0];
        for i in 1..n {
            let r2 = g.r[i] * g.r[i];
            let screen = 4.0 * PI * self.law_at(i).density_derivative(u[i] / g.r[i] + nu);
            diag[i] = cd / r2 + screen;
            if i < n - 1 {
                sub[i] = cl / r2;
                sup[i] = cu / r2;
                rhs[i] = (cl * res[i - 1] + cd * res[i] + cu * res[i + 1]) / r2;
            } else {
                sub[i] = (cl + cu) / r2;
                rhs[i] = ((cl + cu) * res[i - 1] + cd * res[i]) / r2;
            }
        }
        solve_tridiagonal(&sub, &diag, &sup, &rhs)
    }

    /// Inner self-consistency loop at fixed chemical potential.
    fn solve_fixed_nu(&self, u: &mut Vec<f64>, nu: f64, opts: &TfOptions) -> Result<(f64, usize)> {
        let mut anderson = AndersonState::default();
        let mut best = f64::INFINITY;
        let mut best_at = 0;
        let mut res_norm = f64::INFINITY;
        for it in 0..opts.max_iter {
            let rho = self.densities(u, nu);
            let uo = self.u_out(&rho);
            res_norm = self.residual(&rho, &uo, nu);
            if !res_norm.is_finite() {
                return Err(LabError::NoConvergence {
                    what: "Thomas-Fermi mixing",
                    iterations: it,
                    residual: res_norm,
                });
            }
            if res_norm < opts.tol {
                return Ok((res_norm, it));
            }
            if res_norm < 0.5 * best {
                best = res_norm;
                best_at = it;
            } else if it - best_at > 40 && res_norm < 1e-3 {
                return Err(LabError::GridTooCoarse { residual: best, tolerance: opts.tol });
            }
            let res: Vec<f64> = uo.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
            match opts.mixing {
                Mixing::ScreenedNewton => {
                    let step = self.newton_step(u, &res, nu);
                    for (x, s) in u.iter_mut().zip(step) {
                        *x += s;
                    }
                }
                Mixing::Linear { factor } => {
                    for (x, r) in u.iter_mut().zip(&res) {
                        *x += factor * r;
                    }
                }
                Mixing::Anderson { depth, factor } => anderson.update(u, &res, depth, factor),
            }
            for x in u.iter_mut() {
                *x = x.min(self.z);
            }
        }
        Err(LabError::NoConvergence {
            what: "Thomas-Fermi mixing",
            iterations: opts.max_iter,
            residual: res_norm,
        })
    }

    fn electrons(&self, u: &[f64], nu: f64) -> f64 {
        self.volume(&self.densities(u, nu))
    }
}

#[derive(Default)]
struct AndersonState {
    xs: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
}

impl AndersonState {
    fn update(&mut self, x: &mut [f64], f: &[f64], depth: usize, beta: f64) {
        self.xs.push(x.to_vec());
        self.fs.push(f.to_vec());
        if self.xs.len() > depth + 1 {
            self.xs.remove(0);
            self.fs.remove(0);
        }
        let m = self.xs.len() - 1;
        let n = x.len();
        if m == 0 {
            for (xi, fi) in x.iter_mut().zip(f) {
                *xi += beta * fi;
            }
            return;
        }
        let dx: Vec<Vec<f64>> = (0..m).map(|k| diff(&self.xs[k + 1], &self.xs[k])).collect();
        let df: Vec<Vec<f64>> = (0..m).map(|k| diff(&self.fs[k + 1], &self.fs[k])).collect();
        let mut a = vec![vec![0.0; m]; m];
        let mut b = vec![0.0; m];
        for i in 0..m {
            for j in 0..m {
                a[i][j] = dot(&df[i], &df[j]);
            }
            a[i][i] *= 1.0 + 1e-10;
            b[i] = dot(&df[i], f);
        }
        let g = solve_dense(a, b);
        for i in 0..n {
            let mut xi = x[i] + beta * f[i];
            for k in 0..m {
                xi -= g[k] * (dx[k][i] + beta * df[k][i]);
            }
            x[i] = xi;
        }
    }
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
        a.swap(c, p);
        b.swap(c, p);
        if a[c][c] == 0.0 {
            continue;
        }
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = if a[i][i] == 0.0 { 0.0 } else { (b[i] - s) / a[i][i] };
    }
    x
}

/// Thomas algorithm; `sub[0]` and `sup[n-1]` are ignored.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = if i < n - 1 { sup[i] / m } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Solves the Thomas-Fermi atom with charge `z` and `n` electrons.
///
/// Atoms with `n >= z` are neutral (`nu = 0`, `int rho = z`); otherwise `nu`
/// is bisected in `[-z^2, 0]` until the electron count matches.
pub fn solve_tf_atom(z: f64, n: f64, law: PressureLaw, grid: RadialGrid, opts: &TfOptions) -> Result<TfSolution> {
    if !(z > 0.0) || !(n > 0.0) {
        return Err(LabError::PreconditionViolation("Z and N must be positive".into()));
    }
    let r0 = opts.matching_radius.unwrap_or(law.gamma * law.h);
    let prob = Problem::new(z, &grid, law, r0);
    let zc = z.cbrt();
    let mut u: Vec<f64> = grid.r.iter().map(|r| z * (-r * zc).exp()).collect();

    let (nu, residual, iterations) = if n >= z {
        let (res, it) = prob.solve_fixed_nu(&mut u, 0.0, opts)?;
        (0.0, res, it)
    } else {
        let (mut lo, mut hi) = (-z * z, 0.0);
        let mut u_lo = u.clone();
        prob.solve_fixed_nu(&mut u_lo, lo, opts)?;
        // Very small electron counts need a deeper chemical potential.
        while prob.electrons(&u_lo, lo) > n {
            hi = lo;
            lo *= 4.0;
            prob.solve_fixed_nu(&mut u_lo, lo, opts)?;
            if lo < -1e12 * z * z {
                return Err(LabError::NoConvergence {
                    what: "chemical potential bracket",
                    iterations: 0,
                    residual: f64::NAN,
                });
            }
        }
        let mut total_it = 0;
        let mut last = (lo, 0.0);
        let mut u_mid = u.clone();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            u_mid.clone_from(&u_lo);
            let (res, it) = prob.solve_fixed_nu(&mut u_mid, mid, opts)?;
            total_it += it;
            let count = prob.electrons(&u_mid, mid);
            last = (mid, res);
            if (count - n).abs() <= opts.charge_tol * n || hi - lo <= 1e-15 * lo.abs() {
                break;
            }
            if count < n {
                lo = mid;
                u_lo.clone_from(&u_mid);
            } else {
                hi = mid;
            }
        }
        u = u_mid;
        (last.0, last.1, total_it)
    };

    let w: Vec<f64> = grid.r.iter().zip(&u).map(|(r, u)| u / r).collect();
    let rho = prob.densities(&u, nu);
    let energy = energies(&prob, &w, &rho, nu);
    let electrons = prob.volume(&rho);
    let matching_radius = prob.matching_radius();
    Ok(TfSolution {
        z,
        n_target: n,
        law,
        matching_radius,
        grid,
        w,
        rho: rho.v,
        nu,
        electrons,
        residual,
        iterations,
        energy,
    })
}

fn energies(prob: &Problem, w: &[f64], rho: &Field, nu: f64) -> EnergyParts {
    let r = &prob.grid.r;
    let (q, i) = prob.poisson(rho);
    let phi_ee: Vec<f64> = r.iter().zip(q.iter().zip(&i)).map(|(r, (q, i))| q / r + i).collect();
    let rho_r = |k: usize, law: &PressureLaw| law.density(w[k] + nu);
    let kinetic = prob.volume(&prob.field(|law, k| law.kinetic_density(rho_r(k, law))));
    let attraction = prob.volume(&prob.field(|law, k| -prob.z * rho_r(k, law) / r[k]));
    let repulsion = prob.volume(&prob.field(|law, k| 0.5 * phi_ee[k] * rho_r(k, law)));
    let pressure = prob.volume(&prob.field(|law, k| law.pressure(w[k] + nu)));
    let electrons = prob.volume(rho);
    EnergyParts {
        kinetic,
        attraction,
        repulsion,
        total: kinetic + attraction + repulsion,
        dual: -pressure - repulsion + nu * electrons,
    }
}

/// Recomputes primal and dual energies from the stored potential and `nu`.
pub fn tf_energy(sol: &TfSolution) -> EnergyParts {
    let prob = Problem::new(sol.z, &sol.grid, sol.law, sol.matching_radius);
    let u: Vec<f64> = sol.grid.r.iter().zip(&sol.w).map(|(r, w)| r * w).collect();
    let rho = prob.densities(&u, sol.nu);
    energies(&prob, &sol.w, &rho, sol.nu)
}

impl TfSolution {
    /// Self-consistency residual of this solution re-evaluated on another grid
    /// covering the same interval, with the potential interpolated in `ln r`.
    pub fn residual_on(&self, reference: &RadialGrid) -> f64 {
        let prob = Problem::new(self.z, reference, self.law, self.matching_radius);
        let u_self: Vec<f64> = self.grid.r.iter().zip(&self.w).map(|(r, w)| r * w).collect();
        let u: Vec<f64> = reference.r.iter().map(|&r| self.grid.interpolate(&u_self, r)).collect();
        let rho = prob.densities(&u, self.nu);
        let uo = prob.u_out(&rho);
        prob.residual(&rho, &uo, self.nu)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct UniversalTf {
    pub slope: f64,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Universal neutral-atom energy `E / Z^{7/3}` for spin factor 2, from the
/// initial slope of the universal profile.
pub fn universal_energy_constant(slope: f64) -> f64 {
    let b0 = 0.5 * (0.75 * PI).powf(2.0 / 3.0);
    3.0 / 7.0 * slope / b0
}

/// Length scale `b0 Z^{-1/3}` of the universal profile: `W(r) = Z phi(r / b) / r`.
pub fn universal_length(z: f64) -> f64 {
    0.5 * (0.75 * PI).powf(2.0 / 3.0) * z.powf(-1.0 / 3.0)
}

enum Shot {
    HitZero,
    TurnedUp,
    Survived,
}

/// RK4 in `t = sqrt(x)`, where `phi'' = phi^{3/2}/sqrt(x)` becomes the regular
/// system `y' = 2 t v`, `v' = 2 y^{3/2}`.
fn shoot(slope: f64, dt: f64, t_max: f64, record: Option<&mut Vec<(f64, f64)>>) -> Shot {
    let rhs = |t: f64, y: f64, v: f64| (2.0 * t * v, 2.0 * y.max(0.0).powf(1.5));
    let (mut t, mut y, mut v) = (0.0, 1.0, slope);
    let steps = (t_max / dt).ceil() as usize;
    let mut rec = record;
    for _ in 0..steps {
        if let Some(r) = rec.as_deref_mut() {
            r.push((t * t, y));
        }
        let (k1y, k1v) = rhs(t, y, v);
        let (k2y, k2v) = rhs(t + 0.5 * dt, y + 0.5 * dt * k1y, v + 0.5 * dt * k1v);
        let (k3y, k3v) = rhs(t + 0.5 * dt, y + 0.5 * dt * k2y, v + 0.5 * dt * k2v);
        let (k4y, k4v) = rhs(t + dt, y + dt * k3y, v + dt * k3v);
        y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += dt;
        if y < 0.0 {
            return Shot::HitZero;
        }
        if v > 0.0 {
            return Shot::TurnedUp;
        }
    }
    Shot::Survived
}

fn bisect_slope(dt: f64, t_max: f64) -> Result<f64> {
    let (mut lo, mut hi) = (-2.0, -1.0);
    if !matches!(shoot(lo, dt, t_max, None), Shot::HitZero) || !matches!(shoot(hi, dt, t_max, None), Shot::TurnedUp)
    {
        return Err(LabError::NoConvergence { what: "universal TF bracket", iterations: 0, residual: f64::NAN });
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(mid, dt, t_max, None) {
            Shot::HitZero => lo = mid,
            Shot::TurnedUp => hi = mid,
            Shot::Survived => return Ok(mid),
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves `phi'' = phi^{3/2}/sqrt(x)`, `phi(0) = 1`, `phi(inf) = 0` by shooting
/// on the initial slope, Richardson-extrapolated over two step sizes.
pub fn solve_universal_tf(x_max: f64, dt: f64) -> Result<UniversalTf> {
    let t_max = x_max.sqrt();
    let coarse = bisect_slope(dt, t_max)?;
    let fine = bisect_slope(0.5 * dt, t_max)?;
    let slope = fine + (fine - coarse) / 15.0;
    let mut rec = Vec::new();
    shoot(fine, 0.5 * dt, t_max, Some(&mut rec));
    let (x, phi) = rec.into_iter().unzip();
    Ok(UniversalTf { slope, x, phi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shell_volume() {
        let g = RadialGrid::for_charge(1.0);
        let body: f64 = g.weights.iter().zip(&g.r).map(|(w, r)| w * r * r).sum();
        let exact = (g.r_max.powi(3) - g.r_min.powi(3)) / 3.0;
        assert!(((body - exact) / exact).abs() < 1e-8);
    }

    #[test]
    fn tridiagonal_solve() {
        let x = solve_tridiagonal(&[0.0, 1.0, 1.0], &[4.0, 4.0, 4.0], &[1.0, 1.0, 0.0], &[5.0, 6.0, 5.0]);
        for xi in x {
            assert!((xi - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn universal_profile_starts_at_one_and_decreases() {
        let u = solve_universal_tf(100.0, 2e-3).unwrap();
        assert_eq!(u.phi[0], 1.0);
        assert!(u.phi.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn ionised_atom_has_negative_nu() {
        let sol = solve_tf_atom(
            1.0,
            0.5,
            PressureLaw::nonrel(2.0, 1.0),
            RadialGrid::for_charge(1.0),
            &TfOptions::default(),
        )
        .unwrap();
        assert!(sol.nu < 0.0);
        assert!((sol.electrons - 0.5).abs() < 1e-6);
    }
}
