//! Physical parameters, regime checks and the atomic/local rescalings.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_2_PI;

use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSystem {
    /// Nuclear charges.
    pub z: Vec<f64>,
    /// Nuclear positions in atomic-unit lengths.
    pub y: Vec<[f64; 3]>,
    /// Electron count.
    pub n: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q: u32,
}

impl PhysicalSystem {
    pub fn atom(z: f64, n: f64, alpha: f64, beta: f64) -> Self {
        PhysicalSystem { z: vec![z], y: vec![[0.0; 3]], n, alpha, beta, q: 2 }
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    pub fn z_max(&self) -> f64 {
        self.z.iter().cloned().fold(0.0, f64::max)
    }

    /// Minimal internuclear distance, infinite for a single nucleus.
    pub fn min_distance(&self) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..self.y.len() {
            for j in i + 1..self.y.len() {
                d = d.min(dist(&self.y[i], &self.y[j]));
            }
        }
        d
    }

    fn check_structure(&self) -> Result<()> {
        if self.z.is_empty() {
            return Err(LabError::Config("at least one nucleus is required".into()));
        }
        if self.z.len() != self.y.len() {
            return Err(LabError::Config(format!(
                "{} charges but {} positions",
                self.z.len(),
                self.y.len()
            )));
        }
        if self.z.iter().any(|&z| !(z > 0.0) || !z.is_finite()) {
            return Err(LabError::Config("nuclear charges must be positive".into()));
        }
        if !(self.n > 0.0) {
            return Err(LabError::Config("electron count must be positive".into()));
        }
        if !(self.alpha >= 0.0) || !(self.beta >= 0.0) {
            return Err(LabError::Config("alpha and beta must be nonnegative".into()));
        }
        if self.q == 0 {
            return Err(LabError::Config("spin factor q must be positive".into()));
        }
        Ok(())
    }
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eps: f64,
    pub kappa_star: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { eps: 0.01, kappa_star: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub name: String,
    pub nucleus: Option<usize>,
    pub passed: bool,
    /// Positive when satisfied; the amount by which the bound is met.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub conditions: Vec<Condition>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    /// Converts the first failing condition into its error.
    pub fn into_result(self, sys: &PhysicalSystem, th: Thresholds) -> Result<ValidationReport> {
        for c in &self.conditions {
            if c.passed {
                continue;
            }
            let m = c.nucleus.unwrap_or(0);
            return Err(match c.name.as_str() {
                "subcriticality" => LabError::SubcriticalityViolation {
                    index: m,
                    value: sys.z[m] * sys.beta,
                    limit: FRAC_2_PI - th.eps,
                },
                "coupling" => LabError::CouplingViolation {
                    index: m,
                    value: sys.alpha * sys.z[m],
                    limit: coupling_cap(sys.beta * sys.z[m], th.kappa_star),
                },
                _ => {
                    let (first, second, distance) = closest_pair(sys);
                    LabError::GeometryViolation { first, second, distance }
                }
            });
        }
        Ok(self)
    }
}

fn closest_pair(sys: &PhysicalSystem) -> (usize, usize, f64) {
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..sys.y.len() {
        for j in i + 1..sys.y.len() {
            let d = dist(&sys.y[i], &sys.y[j]);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

fn coupling_cap(zbeta: f64, kappa_star: f64) -> f64 {
    kappa_star * (FRAC_2_PI - zbeta).max(0.0).powf(1.5)
}

/// Evaluates every regime condition; use [`ValidationReport::into_result`]
/// or [`validate`] to turn failures into errors.
pub fn validate_system(sys: &PhysicalSystem, th: Thresholds) -> Result<ValidationReport> {
    sys.check_structure()?;
    let mut conditions = Vec::new();
    for (m, &z) in sys.z.iter().enumerate() {
        let margin = FRAC_2_PI - th.eps - z * sys.beta;
        conditions.push(Condition {
            name: "subcriticality".into(),
            nucleus: Some(m),
            passed: margin > 0.0,
            margin,
        });
    }
    for (m, &z) in sys.z.iter().enumerate() {
        let margin = coupling_cap(z * sys.beta, th.kappa_star) - sys.alpha * z;
        conditions.push(Condition {
            name: "coupling".into(),
            nucleus: Some(m),
            passed: margin >= 0.0,
            margin,
        });
    }
    if sys.m() >= 2 {
        let d = sys.min_distance();
        conditions.push(Condition { name: "geometry".into(), nucleus: None, passed: d > 0.0, margin: d });
    }
    Ok(ValidationReport { conditions })
}

pub fn validate(sys: &PhysicalSystem, th: Thresholds) -> Result<ValidationReport> {
    validate_system(sys, th)?.into_result(sys, th)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Regime {
    pub h: f64,
    pub kappa: f64,
    pub gamma: Vec<f64>,
    pub z_rel: Vec<f64>,
    pub a: f64,
}

/// Semiclassical variables of the molecular problem, with `Z = max Z_m`.
pub fn atomic_rescale(sys: &PhysicalSystem) -> Regime {
    let z = sys.z_max();
    Regime {
        h: z.powf(-1.0 / 3.0),
        kappa: sys.alpha * z,
        gamma: sys.z.iter().map(|&zm| sys.beta * zm).collect(),
        z_rel: sys.z.iter().map(|&zm| zm / z).collect(),
        a: z.cbrt() * sys.min_distance(),
    }
}

impl Regime {
    /// Recovers `(Z_m, alpha, beta, d)` from the rescaled variables.
    pub fn unscale(&self) -> (Vec<f64>, f64, f64, f64) {
        let z = self.h.powi(-3);
        let zs: Vec<f64> = self.z_rel.iter().map(|&r| r * z).collect();
        let beta = self.gamma[0] / zs[0];
        (zs, self.kappa / z, beta, self.a * self.h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalRegime {
    pub ell: f64,
    pub h_loc: f64,
    pub gamma_loc: f64,
    pub kappa_loc: f64,
    pub varsigma: f64,
    /// `1 / (kappa_loc h_loc^2)`, equal to `ell / alpha`.
    pub penalty: f64,
}

/// Rescaling of a ball of radius `ell` around a nucleus of charge `Z = max Z_m`.
pub fn local_rescale(sys: &PhysicalSystem, ell: f64, defect_scale: f64) -> Result<LocalRegime> {
    if !(ell > 0.0) {
        return Err(LabError::PreconditionViolation("ell must be positive".into()));
    }
    let z = sys.z_max();
    let h_loc = 1.0 / (z * ell).sqrt();
    let gamma_loc = sys.beta / h_loc;
    let kappa_loc = z * sys.alpha;
    let penalty = 1.0 / (kappa_loc * h_loc * h_loc);
    if sys.alpha > 0.0 {
        let direct = ell / sys.alpha;
        debug_assert!(((penalty - direct) / direct).abs() < 1e-12);
    }
    if gamma_loc > 1.0 + 4.0 * f64::EPSILON {
        return Err(LabError::GammaOutOfRange { gamma: gamma_loc });
    }
    Ok(LocalRegime {
        ell,
        h_loc,
        gamma_loc,
        kappa_loc,
        varsigma: kappa_loc * defect_scale * h_loc,
        penalty,
    })
}
