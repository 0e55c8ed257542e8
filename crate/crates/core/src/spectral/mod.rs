//! Spinor operators on lattices, spectral matrix functions and
//! negative-spectrum traces. Radial channels and the Scott limit live in
//! [`channel`].

pub mod channel;

use faer::{c64, Mat, Side};
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::lattice::{dirac_sigma, hermitize, GaugeLattice};

pub use channel::{chandrasekhar_channel, scott_estimate, ChannelGrid, ScottEstimate, ScottProtocol};

/// Eigenvalues (ascending) and orthonormal eigenvectors as columns.
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Mat<c64>,
}

pub fn hermitian_eigen(m: &Mat<c64>) -> Result<Eigen> {
    let dim = m.nrows();
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(|_| LabError::EigendecompositionFailure { dim })?;
    let s = evd.S().column_vector();
    let values: Vec<f64> = (0..dim).map(|i| s[i].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::EigendecompositionFailure { dim });
    }
    Ok(Eigen { values, vectors: evd.U().to_owned() })
}

pub fn hermitian_eigenvalues(m: &Mat<c64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    m.self_adjoint_eigenvalues(Side::Lower).map_err(|_| LabError::EigendecompositionFailure { dim })
}

/// `Q diag(f) Q^*`.
pub fn spectral_apply(e: &Eigen, f: impl Fn(f64) -> f64) -> Mat<c64> {
    let q = &e.vectors;
    let fv: Vec<f64> = e.values.iter().map(|&x| f(x)).collect();
    let qf = Mat::<c64>::from_fn(q.nrows(), q.ncols(), |i, j| q[(i, j)] * fv[j]);
    let mut out = &qf * q.adjoint();
    hermitize(&mut out);
    out
}

/// Relativistic kinetic function `sqrt(g^-2 x + g^-4) - g^-2`, written as
/// `x / (sqrt(g^2 x + 1) + 1)`; equals `x/2` at `g = 0`.
pub fn kinetic_function(x: f64, gamma: f64) -> f64 {
    x / ((gamma * gamma * x + 1.0).max(0.0).sqrt() + 1.0)
}

#[derive(Clone, Debug)]
pub struct SpinorOperator {
    pub matrix: Mat<c64>,
    pub h: f64,
    pub gamma: f64,
    pub sites: usize,
}

impl SpinorOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest absolute eigenvalue bound by the max row sum.
    pub fn norm_bound(&self) -> f64 {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.matrix[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Pauli square `L = ((hD - A) . sigma)^2`, formed as an exact matrix square.
pub fn build_pauli_lattice(lat: &GaugeLattice, h: f64) -> SpinorOperator {
    let d = dirac_sigma(lat, h);
    let mut l = &d * &d;
    hermitize(&mut l);
    SpinorOperator { matrix: l, h, gamma: 0.0, sites: lat.sites() }
}

pub struct RelativisticHamiltonian {
    /// `f(L) - V`.
    pub op: SpinorOperator,
    /// Eigensystem of `L`.
    pub l_eigen: Eigen,
    /// Eigenvalues of `S = sqrt(gamma^2 L + 1)` in the same basis.
    pub s_values: Vec<f64>,
}

/// `H = f_gamma(L) - diag(V)` with `f` applied through the eigensystem of `L`.
/// `V` is given per site and acts identically on both spin components.
pub fn relativistic_hamiltonian(l: &SpinorOperator, v: &[f64], gamma: f64) -> Result<RelativisticHamiltonian> {
    let e = hermitian_eigen(&l.matrix)?;
    Ok(hamiltonian_from_eigen(l, e, v, gamma))
}

pub fn hamiltonian_from_eigen(l: &SpinorOperator, e: Eigen, v: &[f64], gamma: f64) -> RelativisticHamiltonian {
    let mut m = spectral_apply(&e, |x| kinetic_function(x.max(0.0), gamma));
    for (site, &vx) in v.iter().enumerate() {
        for spin in 0..2 {
            let k = 2 * site + spin;
            m[(k, k)] -= c64::new(vx, 0.0);
        }
    }
    let s_values = e.values.iter().map(|&x| (gamma * gamma * x.max(0.0) + 1.0).sqrt()).collect();
    RelativisticHamiltonian {
        op: SpinorOperator { matrix: m, h: l.h, gamma, sites: l.sites },
        l_eigen: e,
        s_values,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceNeg {
    /// `sum_{lambda < tau} (lambda - tau)`.
    pub trace: f64,
    pub eigenvalues: Vec<f64>,
    /// Spectral projector diagonal `e(x, x, tau)` summed over spin, per site.
    pub projector_diag: Vec<f64>,
}

pub fn trace_neg(h: &SpinorOperator, tau: f64) -> Result<TraceNeg> {
    let e = hermitian_eigen(&h.matrix)?;
    Ok(trace_neg_from_eigen(&e, tau, h.sites))
}

pub fn trace_neg_from_eigen(e: &Eigen, tau: f64, sites: usize) -> TraceNeg {
    let trace = e.values.iter().filter(|&&l| l < tau).map(|&l| l - tau).sum();
    let dim = e.vectors.nrows();
    let mut diag = vec![0.0; sites.max(dim.div_ceil(2))];
    for (j, &l) in e.values.iter().enumerate() {
        if l >= tau {
            break;
        }
        for i in 0..dim {
            diag[i / 2] += e.vectors[(i, j)].norm_sqr();
        }
    }
    TraceNeg { trace, eigenvalues: e.values.clone(), projector_diag: diag }
}

/// Dense matrix from real diagonal entries.
pub fn diagonal(values: &[f64]) -> Mat<c64> {
    Mat::<c64>::from_fn(values.len(), values.len(), |i, j| if i == j { c64::new(values[i], 0.0) } else { c64::new(0.0, 0.0) })
}

/// Sandwich `diag(phi) M diag(phi)` with `phi` given per site.
pub fn localize(m: &Mat<c64>, phi: &[f64]) -> Mat<c64> {
    Mat::<c64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (phi[i / 2] * phi[j / 2]))
}
