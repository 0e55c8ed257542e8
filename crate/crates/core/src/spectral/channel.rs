//! Radial Chandrasekhar channels `f_gamma(-d^2/dr^2 + l(l+1)/r^2) - Z/r` and the
//! localized-trace Scott limit built from them.

use faer::{Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_2_PI, PI};

use super::kinetic_function;
use crate::error::{LabError, Result};
use crate::phase_space::PressureLaw;
use crate::quadrature;

/// Cutoff profile: 1 on `[0, 1/2]`, 0 on `[1, inf)`, and the quintic
/// smoothstep `1 - (10u^3 - 15u^4 + 6u^5)`, `u = 2t - 1`, in between.
pub fn cutoff(t: f64) -> f64 {
    let t = t.abs();
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        let u = 2.0 * t - 1.0;
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }
}

/// Exponentially stretched grid on `(0, R)` with Dirichlet walls:
/// `r_j = R (e^{c t_j} - 1)/(e^c - 1)`, `t_j = j/(N+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelGrid {
    pub box_radius: f64,
    pub nodes: usize,
    pub stretch: f64,
}

impl ChannelGrid {
    pub fn for_charge(z: f64) -> Self {
        ChannelGrid { box_radius: 256.0 / z, nodes: 1500, stretch: 6.0 }
    }

    /// Interior nodes, lumped masses and the symmetrised stiffness (diagonal, off-diagonal).
    fn discretize(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.nodes;
        let c = self.stretch;
        let all: Vec<f64> = (0..n + 2)
            .map(|j| self.box_radius * (c * j as f64 / (n + 1) as f64).exp_m1() / c.exp_m1())
            .collect();
        let hp: Vec<f64> = all.windows(2).map(|w| w[1] - w[0]).collect();
        let r = all[1..=n].to_vec();
        let mass: Vec<f64> = (1..=n).map(|j| 0.5 * (all[j + 1] - all[j - 1])).collect();
        let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let diag = (0..n).map(|i| (1.0 / hp[i] + 1.0 / hp[i + 1]) * s[i] * s[i]).collect();
        let off = (0..n - 1).map(|i| -s[i] * s[i + 1] / hp[i + 1]).collect();
        (r, mass, diag, off)
    }
}

/// Negative spectrum of one angular-momentum channel. Eigenvectors are
/// Euclidean-normalised in the mass-symmetrised basis, so `v_i^2` is the
/// probability carried by node `i`.
#[derive(Clone, Debug)]
pub struct ChannelSpectrum {
    pub ell: usize,
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

pub fn chandrasekhar_channel(z: f64, gamma: f64, ell: usize, grid: &ChannelGrid) -> Result<ChannelSpectrum> {
    if z * gamma >= FRAC_2_PI {
        return Err(LabError::SubcriticalityViolation { index: 0, value: z * gamma, limit: FRAC_2_PI });
    }
    let (r, _mass, mut diag, off) = grid.discretize();
    let cent = (ell * (ell + 1)) as f64;
    for (d, &ri) in diag.iter_mut().zip(&r) {
        *d += cent / (ri * ri);
    }
    let (values, vectors) = if gamma == 0.0 {
        let hd: Vec<f64> = diag.iter().zip(&r).map(|(d, ri)| 0.5 * d - z / ri).collect();
        let ho: Vec<f64> = off.iter().map(|o| 0.5 * o).collect();
        tridiagonal_negative(&hd, &ho)
    } else {
        let n = r.len();
        let l = Mat::<f64>::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i + 1 == j {
                off[i]
            } else if j + 1 == i {
                off[j]
            } else {
                0.0
            }
        });
        let evd = l.self_adjoint_eigen(Side::Lower).map_err(|_| LabError::EigendecompositionFailure { dim: n })?;
        let q = evd.U();
        let lam = evd.S().column_vector();
        let qf = Mat::<f64>::from_fn(n, n, |i, j| q[(i, j)] * kinetic_function(lam[j].max(0.0), gamma));
        let mut hmat = &qf * q.transpose();
        for i in 0..n {
            for j in i + 1..n {
                let a = 0.5 * (hmat[(i, j)] + hmat[(j, i)]);
                hmat[(i, j)] = a;
                hmat[(j, i)] = a;
            }
            hmat[(i, i)] -= z / r[i];
        }
        let evd = hmat.self_adjoint_eigen(Side::Lower).map_err(|_| LabError::EigendecompositionFailure { dim: n })?;
        let s = evd.S().column_vector();
        let u = evd.U();
        let mut values = Vec::new();
        let mut vectors = Vec::new();
        for j in 0..n {
            if s[j] >= 0.0 {
                break;
            }
            values.push(s[j]);
            vectors.push((0..n).map(|i| u[(i, j)]).collect());
        }
        (values, vectors)
    };
    Ok(ChannelSpectrum { ell, r, values, vectors })
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x` (Sturm count).
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        let denom = if q == 0.0 { f64::EPSILON * (e[i - 1].abs() + 1.0) } else { q };
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenpairs below zero by bisection on the Sturm sequence and inverse iteration.
fn tridiagonal_negative(d: &[f64], e: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = d.len();
    let k = sturm_count(d, e, 0.0);
    let lower = (0..n)
        .map(|i| {
            let mut off = 0.0;
            if i > 0 {
                off += e[i - 1].abs();
            }
            if i + 1 < n {
                off += e[i].abs();
            }
            d[i] - off
        })
        .fold(f64::INFINITY, f64::min);
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for j in 0..k {
        let (mut lo, mut hi) = (lower, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(d, e, mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        values.push(lambda);
        vectors.push(inverse_iteration(d, e, lambda));
    }
    (values, vectors)
}

fn inverse_iteration(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let shift = lambda + 1e-13 * lambda.abs().max(1e-300);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..4 {
        let sub: Vec<f64> = std::iter::once(0.0).chain(e.iter().cloned()).collect();
        let sup: Vec<f64> = e.iter().cloned().chain(std::iter::once(0.0)).collect();
        let diag: Vec<f64> = d.iter().map(|di| di - shift).collect();
        x = crate::tf_atom::solve_tridiagonal(&sub, &diag, &sup, &x);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScottProtocol {
    /// Cutoff radii in units of `1/Z`.
    pub radii: Vec<f64>,
    /// Box radius in units of `1/Z`.
    pub box_radius: f64,
    pub nodes: usize,
    pub stretch: f64,
    pub l_max: usize,
    pub q: f64,
}

impl Default for ScottProtocol {
    fn default() -> Self {
        ScottProtocol {
            radii: vec![8.0, 16.0, 32.0, 64.0],
            box_radius: 256.0,
            nodes: 1500,
            stretch: 6.0,
            l_max: 12,
            q: 2.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScottEstimate {
    pub z: f64,
    pub beta: f64,
    pub kappa: f64,
    pub l_max: usize,
    pub radii: Vec<f64>,
    pub traces: Vec<f64>,
    pub weyl: Vec<f64>,
    /// `(t_k - w_k) / (2 Z^2)` per radius.
    pub partial: Vec<f64>,
    /// Bound on the omitted channels `l > l_max`, per radius, in trace units.
    pub tail: Vec<f64>,
    pub s: f64,
    pub error: f64,
    pub converged: bool,
}

/// `int Weyl_1 phi_r^2 dx` for the non-relativistic law and `V = Z/|x|`.
pub fn weyl_subtraction(z: f64, r: f64, q: f64) -> f64 {
    let law = PressureLaw::nonrel(q, 1.0);
    let a = 0.5 * r;
    let inner = q * (2.0 * z).powf(2.5) / (30.0 * PI * PI) * 2.0 * a.sqrt();
    let outer = quadrature::integrate(|s| law.pressure(z / s) * (cutoff(s / r) * s).powi(2), a, r, 1e-13, 1e-300);
    -4.0 * PI * (inner + outer)
}

/// Localized traces and extrapolated Scott coefficient without the convergence gate.
pub fn scott_series(z: f64, beta: f64, protocol: &ScottProtocol) -> Result<ScottEstimate> {
    if protocol.radii.len() < 2 {
        return Err(LabError::PreconditionViolation("need at least two cutoff radii".into()));
    }
    let grid = ChannelGrid { box_radius: protocol.box_radius / z, nodes: protocol.nodes, stretch: protocol.stretch };
    let radii: Vec<f64> = protocol.radii.iter().map(|r| r / z).collect();
    let channels: Vec<Result<Vec<f64>>> = (0..=protocol.l_max)
        .into_par_iter()
        .map(|ell| {
            let spec = chandrasekhar_channel(z, beta, ell, &grid)?;
            let deg = protocol.q * (2 * ell + 1) as f64;
            Ok(radii
                .iter()
                .map(|&rc| {
                    let phi2: Vec<f64> = spec.r.iter().map(|&ri| cutoff(ri / rc).powi(2)).collect();
                    deg * spec
                        .values
                        .iter()
                        .zip(&spec.vectors)
                        .map(|(lam, v)| lam * v.iter().zip(&phi2).map(|(vi, p)| vi * vi * p).sum::<f64>())
                        .sum::<f64>()
                })
                .collect())
        })
        .collect();
    let channels: Vec<Vec<f64>> = channels.into_iter().collect::<Result<_>>()?;
    let nr = radii.len();
    let traces: Vec<f64> = (0..nr).map(|k| channels.iter().map(|c| c[k]).sum()).collect();
    let l = protocol.l_max as f64;
    let zeta_tail = 1.0 / (2.0 * (l + 0.5) * (l + 0.5));
    let tail: Vec<f64> = (0..nr).map(|k| channels[protocol.l_max][k].abs() * l.powi(3) * zeta_tail).collect();
    let weyl: Vec<f64> = radii.iter().map(|&r| weyl_subtraction(z, r, protocol.q)).collect();
    let partial: Vec<f64> = (0..nr).map(|k| (traces[k] - weyl[k]) / (2.0 * z * z)).collect();

    let (s, _) = fit_inverse_sqrt(&protocol.radii[nr.saturating_sub(3)..], &partial[nr.saturating_sub(3)..]);
    let diffs: Vec<f64> = partial.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = *diffs.last().expect("two radii");
    let converged = diffs.len() >= 3 && diffs[diffs.len() - 3..].windows(2).all(|w| w[1] < w[0])
        || diffs.len() < 3 && diffs.windows(2).all(|w| w[1] < w[0]);
    let error = last + (s - partial[nr - 1]).abs() + tail[nr - 1] / (2.0 * z * z);
    Ok(ScottEstimate {
        z,
        beta,
        kappa: 0.0,
        l_max: protocol.l_max,
        radii,
        traces,
        weyl,
        partial,
        tail,
        s,
        error,
        converged,
    })
}

/// Scott coefficient `S(0, Z beta)` from localized channel traces, extrapolated
/// in `r^{-1/2}`. Fails with `NotConverged` when the successive differences of
/// the last three radii are not decreasing.
pub fn scott_estimate(z: f64, beta: f64, protocol: &ScottProtocol) -> Result<ScottEstimate> {
    let est = scott_series(z, beta, protocol)?;
    if !est.converged {
        return Err(LabError::NotConverged {
            reason: format!("successive differences not decreasing: {:?}", est.partial),
        });
    }
    Ok(est)
}

/// Least-squares fit of `c0 + c1 / sqrt(r)`.
pub fn fit_inverse_sqrt(r: &[f64], y: &[f64]) -> (f64, f64) {
    let n = r.len() as f64;
    let x: Vec<f64> = r.iter().map(|r| 1.0 / r.sqrt()).collect();
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let c1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    ((sy - c1 * sx) / n, c1)
}
