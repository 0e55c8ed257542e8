//! Self-generated field functional `E(A) = Tr(H_A^-) + (1/(kappa h^2)) int |curl A|^2`
//! on a lattice, its exact gradient, and a descent minimiser.
//!
//! The derivative of `Tr f(L)` uses the divided differences of
//! `f(x) = (sqrt(g^2 x + 1) - 1)/g^2`, which are exactly `1/(s_i + s_j)` with
//! `s = sqrt(g^2 lambda + 1)`; this is the Sylvester solve `S X + X S = P`
//! written in the eigenbasis of `L`.

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::lattice::{dirac_sigma, hermitize, sigma, GaugeLattice};
use crate::spectral::{hermitian_eigen, kinetic_function};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SgfParams {
    pub kappa: f64,
    pub h: f64,
    pub gamma: f64,
    /// Spectral gap guard relative to the operator norm.
    pub gap_guard: f64,
}

impl SgfParams {
    pub fn new(kappa: f64, h: f64, gamma: f64) -> Self {
        SgfParams { kappa, h, gamma, gap_guard: 1e-6 }
    }

    pub fn penalty(&self) -> f64 {
        1.0 / (self.kappa * self.h * self.h)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyEval {
    pub trace: f64,
    pub field_energy: f64,
    pub total: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientReport {
    /// `d Tr(H^-) / dA` per unit volume.
    pub phi: [Vec<f64>; 3],
    /// Full functional gradient per unit volume.
    pub g: [Vec<f64>; 3],
    pub phi_norm: f64,
    pub residual: f64,
    pub energy: EnergyEval,
}

struct Spectral {
    dirac: Mat<c64>,
    l_vectors: Mat<c64>,
    s_values: Vec<f64>,
    h_values: Vec<f64>,
    h_vectors: Mat<c64>,
}

fn decompose(lat: &GaugeLattice, p: &SgfParams, check_gap: bool) -> Result<Spectral> {
    let dirac = dirac_sigma(lat, p.h);
    let mut l = &dirac * &dirac;
    hermitize(&mut l);
    let le = hermitian_eigen(&l)?;
    let dim = lat.dim();
    let q = &le.vectors;
    // H in the eigenbasis of L: diag f(lambda) - Q^* V Q.
    let vq = Mat::<c64>::from_fn(dim, dim, |i, j| q[(i, j)] * lat.v[i / 2]);
    let mut ht = q.adjoint() * &vq;
    for i in 0..dim {
        for j in 0..dim {
            ht[(i, j)] = -ht[(i, j)];
        }
        ht[(i, i)] += c64::new(kinetic_function(le.values[i].max(0.0), p.gamma), 0.0);
    }
    hermitize(&mut ht);
    let he = hermitian_eigen(&ht)?;
    if check_gap {
        let norm = he.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let guard = p.gap_guard * norm;
        if let Some(&v) = he.values.iter().find(|v| v.abs() < guard) {
            return Err(LabError::GapViolation { eigenvalue: v, guard });
        }
    }
    let s_values = le.values.iter().map(|&x| (p.gamma * p.gamma * x.max(0.0) + 1.0).sqrt()).collect();
    Ok(Spectral { dirac, l_vectors: le.vectors, s_values, h_values: he.values, h_vectors: he.vectors })
}

/// `E(A)` for the vector potential and potential stored in `lat`.
pub fn energy_functional(lat: &GaugeLattice, p: &SgfParams) -> Result<EnergyEval> {
    let sp = decompose(lat, p, false)?;
    let trace = sp.h_values.iter().filter(|&&v| v < 0.0).sum::<f64>();
    let field_energy = lat.field_energy();
    Ok(EnergyEval { trace, field_energy, total: trace + p.penalty() * field_energy })
}

/// Exact gradient of [`energy_functional`]. Requires no eigenvalue of `H`
/// within the gap guard of zero.
pub fn phi_gradient(lat: &GaugeLattice, p: &SgfParams) -> Result<GradientReport> {
    let sp = decompose(lat, p, true)?;
    let dim = lat.dim();
    let neg: Vec<usize> = (0..dim).filter(|&j| sp.h_values[j] < 0.0).collect();
    let trace: f64 = neg.iter().map(|&j| sp.h_values[j]).sum();
    let wn = Mat::<c64>::from_fn(dim, neg.len(), |i, k| sp.h_vectors[(i, neg[k])]);
    let pt = &wn * wn.adjoint();
    let xt = Mat::<c64>::from_fn(dim, dim, |i, j| pt[(i, j)] * (1.0 / (sp.s_values[i] + sp.s_values[j])));
    let q = &sp.l_vectors;
    let x = q * &xt * q.adjoint();
    let y = &sp.dirac * &x + &x * &sp.dirac;

    let s3 = lat.spacing.powi(3);
    let sites = lat.sites();
    let mut phi = [vec![0.0; sites], vec![0.0; sites], vec![0.0; sites]];
    for (mu, phi_mu) in phi.iter_mut().enumerate() {
        let sg = sigma(mu);
        for (xs, out) in phi_mu.iter_mut().enumerate() {
            let Some(ys) = lat.neighbor(xs, mu) else { continue };
            let u = lat.link(xs, mu, p.h);
            let mut acc = c64::new(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    let s = sg[a][b];
                    acc += s * (u * y[(2 * ys + b, 2 * xs + a)] + u.conj() * y[(2 * xs + b, 2 * ys + a)]);
                }
            }
            *out = -0.5 * acc.re / s3;
        }
    }
    let fg = lat.field_energy_gradient();
    let pen = p.penalty() / s3;
    let g: [Vec<f64>; 3] = std::array::from_fn(|mu| phi[mu].iter().zip(&fg[mu]).map(|(a, b)| a + pen * b).collect());
    let phi_norm = norm3(&phi);
    let field_energy = lat.field_energy();
    Ok(GradientReport {
        residual: norm3(&g) / phi_norm.max(1.0),
        phi_norm,
        phi,
        g,
        energy: EnergyEval { trace, field_energy, total: trace + p.penalty() * field_energy },
    })
}

fn norm3(v: &[Vec<f64>; 3]) -> f64 {
    v.iter().flat_map(|c| c.iter()).map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MinimizeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: f64,
    pub shrink: f64,
    pub coulomb_gauge: bool,
    pub seed: u64,
    pub max_restarts: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            tol: 1e-6,
            max_iter: 500,
            armijo: 1e-4,
            shrink: 0.5,
            coulomb_gauge: false,
            seed: 0,
            max_restarts: 5,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IterateLog {
    pub step: usize,
    pub energy: f64,
    pub residual: f64,
    pub field_energy: f64,
    pub step_length: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizeResult {
    #[serde(skip)]
    pub lattice: GaugeLattice,
    pub log: Vec<IterateLog>,
    pub converged: bool,
    pub restarts: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub residual: f64,
}

fn axpy(lat: &GaugeLattice, t: f64, d: &[Vec<f64>; 3]) -> GaugeLattice {
    let mut out = lat.clone();
    for mu in 0..3 {
        for (a, di) in out.a[mu].iter_mut().zip(&d[mu]) {
            *a += t * di;
        }
    }
    out
}

fn perturb(lat: &mut GaugeLattice, rng: &mut ChaCha8Rng, size: f64) {
    for comp in lat.a.iter_mut() {
        comp.iter_mut().for_each(|a| *a += size * rng.random_range(-1.0..1.0));
    }
}

fn flatten(v: &[Vec<f64>; 3]) -> Vec<f64> {
    v.iter().flat_map(|c| c.iter().copied()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unflatten(v: &[f64], sites: usize) -> [Vec<f64>; 3] {
    std::array::from_fn(|mu| v[mu * sites..(mu + 1) * sites].to_vec())
}

/// Limited-memory BFGS descent with Armijo backtracking. Never returns an
/// energy above the starting one.
pub fn minimize(a0: &GaugeLattice, p: &SgfParams, opts: &MinimizeOptions) -> Result<MinimizeResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut lat = a0.clone();
    if opts.coulomb_gauge {
        project_coulomb(&mut lat);
    }
    let initial_energy = energy_functional(&lat, p)?.total;
    let s3 = lat.spacing.powi(3);
    let sites = lat.sites();
    let mut log = Vec::new();
    let mut restarts = 0;
    let mut memory: std::collections::VecDeque<(Vec<f64>, Vec<f64>, f64)> = Default::default();
    let mut last: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut step_length = 0.0;

    for step in 0..opts.max_iter {
        let rep = match phi_gradient(&lat, p) {
            Ok(r) => r,
            Err(LabError::GapViolation { .. }) if restarts < opts.max_restarts => {
                restarts += 1;
                let mut cand = lat.clone();
                perturb(&mut cand, &mut rng, 1e-4);
                if energy_functional(&cand, p)?.total <= initial_energy {
                    lat = cand;
                }
                memory.clear();
                last = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        let x = flatten(&lat.a);
        let grad: Vec<f64> = flatten(&rep.g).iter().map(|g| g * s3).collect();
        log.push(IterateLog {
            step,
            energy: rep.energy.total,
            residual: rep.residual,
            field_energy: rep.energy.field_energy,
            step_length,
        });
        if rep.residual <= opts.tol {
            return Ok(MinimizeResult {
                final_energy: rep.energy.total,
                residual: rep.residual,
                lattice: lat,
                log,
                converged: true,
                restarts,
                initial_energy,
            });
        }
        if let Some((x_old, g_old)) = last.take() {
            let sv: Vec<f64> = x.iter().zip(&x_old).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = grad.iter().zip(&g_old).map(|(a, b)| a - b).collect();
            let sy = dot(&sv, &yv);
            if sy > 1e-16 * dot(&sv, &sv).sqrt() * dot(&yv, &yv).sqrt() {
                if memory.len() == 8 {
                    memory.pop_front();
                }
                memory.push_back((sv, yv, 1.0 / sy));
            }
        }
        // two-loop recursion
        let mut q = grad.clone();
        let mut alphas = Vec::with_capacity(memory.len());
        for (sv, yv, rho) in memory.iter().rev() {
            let al = rho * dot(sv, &q);
            q.iter_mut().zip(yv).for_each(|(qi, yi)| *qi -= al * yi);
            alphas.push(al);
        }
        let scale = match memory.back() {
            Some((_, yv, rho)) => 1.0 / (rho * dot(yv, yv)),
            None => 1.0 / (p.penalty() * 12.0 / (lat.spacing * lat.spacing) * s3 + dot(&grad, &grad).sqrt()),
        };
        q.iter_mut().for_each(|v| *v *= scale);
        for ((sv, yv, rho), al) in memory.iter().zip(alphas.iter().rev()) {
            let be = rho * dot(yv, &q);
            q.iter_mut().zip(sv).for_each(|(qi, si)| *qi += (al - be) * si);
        }
        let mut slope = -dot(&grad, &q);
        let dir = if slope < 0.0 {
            unflatten(&q.iter().map(|v| -v).collect::<Vec<_>>(), sites)
        } else {
            memory.clear();
            slope = -dot(&grad, &grad) * scale;
            unflatten(&grad.iter().map(|g| -g * scale).collect::<Vec<_>>(), sites)
        };

        let e0 = rep.energy.total;
        // Once the decrease is below rounding, the gradient still carries information.
        let noise = 64.0 * f64::EPSILON * e0.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let mut cand = axpy(&lat, t, &dir);
            if opts.coulomb_gauge {
                project_coulomb(&mut cand);
            }
            let e = energy_functional(&cand, p)?.total;
            let want = opts.armijo * t * slope;
            if e <= e0 + want || (-want < noise && e <= e0 + noise) {
                accepted = Some(cand);
                break;
            }
            t *= opts.shrink;
        }
        let Some(next) = accepted else {
            return Err(LabError::LineSearchFailure { iteration: step });
        };
        step_length = t;
        last = Some((x, grad));
        lat = next;
    }
    let fin = energy_functional(&lat, p)?;
    let residual = phi_gradient(&lat, p).map(|r| r.residual).unwrap_or(f64::NAN);
    Ok(MinimizeResult {
        final_energy: fin.total,
        residual,
        lattice: lat,
        log,
        converged: residual <= opts.tol,
        restarts,
        initial_energy,
    })
}

/// Removes the lattice-gradient part of `A` by solving `div grad chi = div A`
/// with conjugate gradients; leaves the spectrum and field energy unchanged.
pub fn project_coulomb(lat: &mut GaugeLattice) {
    let n = lat.sites();
    let s = lat.spacing;
    let grad = |chi: &[f64], lat: &GaugeLattice| -> [Vec<f64>; 3] {
        std::array::from_fn(|mu| {
            (0..n).map(|x| lat.neighbor(x, mu).map_or(0.0, |y| (chi[y] - chi[x]) / s)).collect()
        })
    };
    let div = |a: &[Vec<f64>; 3], lat: &GaugeLattice| -> Vec<f64> {
        // adjoint of the forward gradient, negated
        let mut d = vec![0.0; n];
        for (mu, a_mu) in a.iter().enumerate() {
            for x in 0..n {
                if let Some(y) = lat.neighbor(x, mu) {
                    d[y] += a_mu[x] / s;
                    d[x] -= a_mu[x] / s;
                }
            }
        }
        d
    };
    let apply = |chi: &[f64], lat: &GaugeLattice| div(&grad(chi, lat), lat);
    let b = div(&lat.a, lat);
    let mean = b.iter().sum::<f64>() / n as f64;
    let b: Vec<f64> = b.iter().map(|v| v - mean).collect();
    let mut chi = vec![0.0; n];
    let mut r = b.clone();
    let mut d = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let target = 1e-28 * b.iter().map(|v| v * v).sum::<f64>().max(1e-300);
    for _ in 0..10 * n {
        if rr <= target {
            break;
        }
        let ad = apply(&d, lat);
        let dad: f64 = d.iter().zip(&ad).map(|(a, b)| a * b).sum();
        if dad == 0.0 {
            break;
        }
        let alpha = rr / dad;
        for i in 0..n {
            chi[i] += alpha * d[i];
            r[i] -= alpha * ad[i];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            d[i] = r[i] + beta * d[i];
        }
    }
    let gc = grad(&chi, lat);
    for mu in 0..3 {
        for x in 0..n {
            lat.a[mu][x] -= gc[mu][x];
        }
    }
}

/// Lattice Weyl scale `s^3 sum_x P(V(x))` for the non-relativistic law.
pub fn lattice_weyl(lat: &GaugeLattice, h: f64) -> f64 {
    let law = crate::phase_space::PressureLaw::nonrel(2.0, h);
    lat.spacing.powi(3) * lat.v.iter().map(|&v| law.pressure(v)).sum::<f64>()
}

/// Seeded random field with the requested field energy.
pub fn random_start(lat: &GaugeLattice, seed: u64, field_energy: f64) -> GaugeLattice {
    let mut out = lat.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.random_smooth_field(&mut rng, 3, field_energy);
    out
}

/// Centred Gaussian bump of depth 8 and width a quarter of the box, `A = 0`.
pub fn gaussian_bump_benchmark(n: usize, spacing: f64) -> GaugeLattice {
    let mut lat = GaugeLattice::cubic(n, spacing);
    let side = n as f64 * spacing;
    lat.v = crate::lattice::gaussian_bumps(&lat, &[([0.5 * side; 3], 8.0, 0.25 * side)]);
    lat
}
