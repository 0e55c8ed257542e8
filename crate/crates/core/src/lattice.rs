//! Periodic (or open) cubic lattices carrying a vector potential and a
//! scalar potential, and the spinor operators built from them.
//!
//! The vector potential lives on sites; the link between `x` and `x + e_mu`
//! carries the phase `exp(-i s A_mu(x) / h)`. Matrices are indexed by
//! `2 * site + spin`.

use faer::{c64, Mat};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeLattice {
    pub n: [usize; 3],
    pub spacing: f64,
    pub periodic: [bool; 3],
    /// `a[mu][site]`.
    pub a: [Vec<f64>; 3],
    pub v: Vec<f64>,
}

impl GaugeLattice {
    /// Periodic lattice with zero fields.
    pub fn new(n: [usize; 3], spacing: f64) -> Self {
        let sites = n[0] * n[1] * n[2];
        GaugeLattice {
            n,
            spacing,
            periodic: [true; 3],
            a: [vec![0.0; sites], vec![0.0; sites], vec![0.0; sites]],
            v: vec![0.0; sites],
        }
    }

    pub fn cubic(n: usize, spacing: f64) -> Self {
        Self::new([n; 3], spacing)
    }

    pub fn sites(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn dim(&self) -> usize {
        2 * self.sites()
    }

    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.n[0] * (c[1] + self.n[1] * c[2])
    }

    pub fn coords(&self, site: usize) -> [usize; 3] {
        [site % self.n[0], (site / self.n[0]) % self.n[1], site / (self.n[0] * self.n[1])]
    }

    /// Forward neighbour along `mu`, `None` across an open boundary.
    pub fn neighbor(&self, site: usize, mu: usize) -> Option<usize> {
        let mut c = self.coords(site);
        c[mu] += 1;
        if c[mu] == self.n[mu] {
            if !self.periodic[mu] {
                return None;
            }
            c[mu] = 0;
        }
        Some(self.index(c))
    }

    /// Site position relative to the lattice origin, in length units.
    pub fn position(&self, site: usize) -> [f64; 3] {
        let c = self.coords(site);
        [c[0] as f64 * self.spacing, c[1] as f64 * self.spacing, c[2] as f64 * self.spacing]
    }

    /// Minimal-image displacement from `center` (periodic axes only).
    pub fn displacement(&self, site: usize, center: [f64; 3]) -> [f64; 3] {
        let p = self.position(site);
        let mut d = [0.0; 3];
        for mu in 0..3 {
            let len = self.n[mu] as f64 * self.spacing;
            let mut x = p[mu] - center[mu];
            if self.periodic[mu] {
                x -= len * (x / len).round();
            }
            d[mu] = x;
        }
        d
    }

    pub fn link(&self, site: usize, mu: usize, h: f64) -> c64 {
        let phase = -self.spacing * self.a[mu][site] / h;
        c64::new(phase.cos(), phase.sin())
    }

    /// Plaquette field `B_{mu nu}(x)` from forward differences; `None` when the
    /// plaquette crosses an open boundary.
    fn plaquette(&self, site: usize, mu: usize, nu: usize) -> Option<f64> {
        let xm = self.neighbor(site, mu)?;
        let xn = self.neighbor(site, nu)?;
        let a = &self.a;
        Some((a[nu][xm] - a[nu][site] - a[mu][xn] + a[mu][site]) / self.spacing)
    }

    /// Discrete `int |curl A|^2`.
    pub fn field_energy(&self) -> f64 {
        let s3 = self.spacing.powi(3);
        let mut e = 0.0;
        for x in 0..self.sites() {
            for (mu, nu) in [(0, 1), (0, 2), (1, 2)] {
                if let Some(b) = self.plaquette(x, mu, nu) {
                    e += b * b;
                }
            }
        }
        s3 * e
    }

    /// Gradient of [`field_energy`](Self::field_energy) with respect to the site values of `A`.
    pub fn field_energy_gradient(&self) -> [Vec<f64>; 3] {
        let n = self.sites();
        let mut g = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        let c = 2.0 * self.spacing.powi(2);
        for x in 0..n {
            for (mu, nu) in [(0, 1), (0, 2), (1, 2)] {
                if let Some(b) = self.plaquette(x, mu, nu) {
                    let xm = self.neighbor(x, mu).expect("plaquette exists");
                    let xn = self.neighbor(x, nu).expect("plaquette exists");
                    g[nu][xm] += c * b;
                    g[nu][x] -= c * b;
                    g[mu][xn] -= c * b;
                    g[mu][x] += c * b;
                }
            }
        }
        g
    }

    /// Adds the lattice gradient of `chi`: `A_mu(x) += (chi(x + e_mu) - chi(x)) / s`.
    pub fn add_gradient(&mut self, chi: &[f64]) {
        for mu in 0..3 {
            for x in 0..self.sites() {
                if let Some(xm) = self.neighbor(x, mu) {
                    self.a[mu][x] += (chi[xm] - chi[x]) / self.spacing;
                }
            }
        }
    }

    /// Band-limited random vector potential: a few random Fourier modes per
    /// component, rescaled so the field energy equals `target_energy`.
    pub fn random_smooth_field<R: Rng>(&mut self, rng: &mut R, modes: usize, target_energy: f64) {
        let n = self.sites();
        let mut a = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        for comp in a.iter_mut() {
            for _ in 0..modes {
                let k: [f64; 3] = std::array::from_fn(|mu| {
                    let kmax = 1i64.max(self.n[mu] as i64 / 4);
                    rng.random_range(-kmax..=kmax) as f64 * 2.0 * std::f64::consts::PI / self.n[mu] as f64
                });
                let amp: f64 = rng.random_range(-1.0..1.0);
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                for (x, val) in comp.iter_mut().enumerate() {
                    let c = self.coords(x);
                    let arg = k[0] * c[0] as f64 + k[1] * c[1] as f64 + k[2] * c[2] as f64 + phase;
                    *val += amp * arg.cos();
                }
            }
        }
        self.a = a;
        let e = self.field_energy();
        let scale = if e > 0.0 { (target_energy / e).sqrt() } else { 0.0 };
        for comp in self.a.iter_mut() {
            comp.iter_mut().for_each(|v| *v *= scale);
        }
    }
}

const SIGMA: [[[c64; 2]; 2]; 3] = [
    [[c64::new(0.0, 0.0), c64::new(1.0, 0.0)], [c64::new(1.0, 0.0), c64::new(0.0, 0.0)]],
    [[c64::new(0.0, 0.0), c64::new(0.0, -1.0)], [c64::new(0.0, 1.0), c64::new(0.0, 0.0)]],
    [[c64::new(1.0, 0.0), c64::new(0.0, 0.0)], [c64::new(0.0, 0.0), c64::new(-1.0, 0.0)]],
];

/// Pauli matrices.
pub fn sigma(mu: usize) -> [[c64; 2]; 2] {
    SIGMA[mu]
}

/// `(hD - A) . sigma` with symmetric covariant differences, as a dense Hermitian matrix.
pub fn dirac_sigma(lat: &GaugeLattice, h: f64) -> Mat<c64> {
    let dim = lat.dim();
    let mut d = Mat::<c64>::zeros(dim, dim);
    let c = h / (2.0 * lat.spacing);
    for x in 0..lat.sites() {
        for mu in 0..3 {
            let Some(y) = lat.neighbor(x, mu) else { continue };
            // Pi(x, y) = -i c U, Pi(y, x) = +i c conj(U)
            let u = lat.link(x, mu, h);
            let fwd = c64::new(0.0, -c) * u;
            let bwd = c64::new(0.0, c) * u.conj();
            for a in 0..2 {
                for b in 0..2 {
                    let s = SIGMA[mu][a][b];
                    if s == c64::new(0.0, 0.0) {
                        continue;
                    }
                    d[(2 * x + a, 2 * y + b)] += s * fwd;
                    d[(2 * y + a, 2 * x + b)] += s * bwd;
                }
            }
        }
    }
    d
}

/// Hermitian part `(M + M^*)/2`, removing rounding asymmetry.
pub fn hermitize(m: &mut Mat<c64>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = c64::new(m[(i, i)].re, 0.0);
        for j in i + 1..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// Lattice Coulomb potential `coefficient / |x - center|` with minimal-image
/// distances; the value at a site coinciding with the centre is `coefficient * 2 / s`.
pub fn coulomb_potential(lat: &GaugeLattice, center: [f64; 3], coefficient: f64) -> Vec<f64> {
    (0..lat.sites())
        .map(|x| {
            let d = lat.displacement(x, center);
            let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
            if r < 0.5 * lat.spacing { coefficient * 2.0 / lat.spacing } else { coefficient / r }
        })
        .collect()
}

/// Sum of Gaussian bumps `sum_k a_k exp(-|x - c_k|^2 / (2 w_k^2))`, minimal image.
pub fn gaussian_bumps(lat: &GaugeLattice, bumps: &[([f64; 3], f64, f64)]) -> Vec<f64> {
    (0..lat.sites())
        .map(|x| {
            bumps
                .iter()
                .map(|(c, amp, width)| {
                    let d = lat.displacement(x, *c);
                    amp * (-(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (2.0 * width * width)).exp()
                })
                .sum()
        })
        .collect()
}
