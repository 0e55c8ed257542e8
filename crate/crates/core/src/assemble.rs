//! Ground-state energy expansion, remainder formulas and report-only bounds.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::params::PhysicalSystem;
use crate::phase_space::{rel_correction_integrand, Counterterm, PressureLaw};
use crate::tf_atom::{solve_tf_atom, RadialGrid, TfOptions, TfSolution};

/// Coefficients of the `int rho^{4/3}` corrections.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub dirac: Option<f64>,
    pub schwinger: Option<f64>,
    /// When false, Dirac, Schwinger and RCT are all zero.
    pub corrections: bool,
    pub counterterm: Counterterm,
}

impl Coefficients {
    /// Exchange constant `-(3/4)(3/pi)^{1/3}` and Schwinger's `2/9` of it.
    pub fn standard() -> Self {
        let dirac = -0.75 * (3.0 / PI).cbrt();
        Coefficients {
            dirac: Some(dirac),
            schwinger: Some(2.0 / 9.0 * dirac),
            corrections: true,
            counterterm: Counterterm::LeadingLargeW,
        }
    }

    pub fn off() -> Self {
        Coefficients { dirac: None, schwinger: None, corrections: false, counterterm: Counterterm::LeadingLargeW }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScottEntry {
    pub kappa_arg: f64,
    pub beta_arg: f64,
    pub s: f64,
    pub err: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ScottTable {
    pub entries: Vec<ScottEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Computed,
    Interpolated,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScottLookup {
    pub kappa_arg: f64,
    pub beta_arg: f64,
    pub s: f64,
    pub err: f64,
    pub provenance: Provenance,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()))
}

/// Linear interpolation along one coordinate among entries sharing the other.
fn along(points: &mut [(f64, f64, f64)], x: f64) -> Option<(f64, f64)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    points.windows(2).find(|w| w[0].0 <= x && x <= w[1].0).map(|w| {
        let t = (x - w[0].0) / (w[1].0 - w[0].0);
        (w[0].1 + t * (w[1].1 - w[0].1), w[0].2.max(w[1].2))
    })
}

impl ScottTable {
    /// Exact entry, or linear interpolation along an axis on which the
    /// query matches table values exactly, or bilinear on a full cell.
    pub fn lookup(&self, kappa: f64, beta: f64) -> Result<ScottLookup> {
        let hit = |s, err, provenance| ScottLookup { kappa_arg: kappa, beta_arg: beta, s, err, provenance };
        if let Some(e) = self.entries.iter().find(|e| same(e.kappa_arg, kappa) && same(e.beta_arg, beta)) {
            return Ok(hit(e.s, e.err, Provenance::Computed));
        }
        let mut row: Vec<_> = self.entries.iter().filter(|e| same(e.kappa_arg, kappa)).map(|e| (e.beta_arg, e.s, e.err)).collect();
        if let Some((s, err)) = along(&mut row, beta) {
            return Ok(hit(s, err, Provenance::Interpolated));
        }
        let mut col: Vec<_> = self.entries.iter().filter(|e| same(e.beta_arg, beta)).map(|e| (e.kappa_arg, e.s, e.err)).collect();
        if let Some((s, err)) = along(&mut col, kappa) {
            return Ok(hit(s, err, Provenance::Interpolated));
        }
        let mut kappas: Vec<f64> = self.entries.iter().map(|e| e.kappa_arg).collect();
        kappas.sort_by(f64::total_cmp);
        kappas.dedup_by(|a, b| same(*a, *b));
        let lower = kappas.iter().rev().find(|&&k| k <= kappa);
        let upper = kappas.iter().find(|&&k| k >= kappa);
        if let (Some(&k0), Some(&k1)) = (lower, upper) {
            let at = |k: f64| {
                let mut pts: Vec<_> =
                    self.entries.iter().filter(|e| same(e.kappa_arg, k)).map(|e| (e.beta_arg, e.s, e.err)).collect();
                along(&mut pts, beta)
            };
            if let (Some((s0, e0)), Some((s1, e1))) = (at(k0), at(k1)) {
                let t = (kappa - k0) / (k1 - k0);
                return Ok(hit(s0 + t * (s1 - s0), e0.max(e1), Provenance::Interpolated));
            }
        }
        Err(LabError::MissingScottEntry { kappa, beta })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EnergyBreakdown {
    pub e_tf: f64,
    pub scott_sum: f64,
    pub dirac: f64,
    pub schwinger: f64,
    pub rct: f64,
    pub total: f64,
    pub remainder_r1: f64,
    pub remainder_r2: f64,
    /// `Z^{4/3} (R1 + R2)` with `Z` the total nuclear charge.
    pub remainder_scale: f64,
    pub scott_entries: Vec<ScottLookup>,
    pub interpolated: bool,
    pub coefficients: Coefficients,
}

/// Per-atom TF data used by the assembler.
#[derive(Clone, Debug)]
pub struct AtomTf {
    pub z: f64,
    pub energy: f64,
    pub rho_43: f64,
    pub rct: f64,
}

/// `int rho^{4/3}` and the regularised relativistic correction of one atom.
pub fn atom_terms(sol: &TfSolution, beta: f64, counterterm: Counterterm) -> AtomTf {
    let g = &sol.grid;
    let rho43: Vec<f64> = sol.rho.iter().map(|r| r.max(0.0).powf(4.0 / 3.0)).collect();
    let rct: Vec<f64> = sol
        .w
        .iter()
        .map(|w| {
            if beta == 0.0 {
                0.0
            } else {
                -rel_correction_integrand(w + sol.nu, beta, sol.law.q, sol.law.h, counterterm).regularized
            }
        })
        .collect();
    AtomTf { z: sol.z, energy: sol.energy.total, rho_43: g.volume_integral(&rho43), rct: g.volume_integral(&rct) }
}

/// Non-relativistic TF solutions for each nucleus, with `N` split in
/// proportion to the charges.
pub fn atomic_tf(sys: &PhysicalSystem) -> Result<Vec<TfSolution>> {
    let total: f64 = sys.z.iter().sum();
    sys.z
        .par_iter()
        .map(|&z| {
            let law = PressureLaw::nonrel(sys.q as f64, 1.0);
            solve_tf_atom(z, sys.n * z / total, law, RadialGrid::for_charge(z), &TfOptions::default())
        })
        .collect()
}

/// Assembles the expansion; `tf_correction` is added to the superposed
/// atomic TF energy.
pub fn assemble_energy(
    sys: &PhysicalSystem,
    atoms: &[AtomTf],
    tf_correction: f64,
    table: &ScottTable,
    coeffs: &Coefficients,
) -> Result<EnergyBreakdown> {
    if atoms.len() != sys.z.len() {
        return Err(LabError::PreconditionViolation(format!("{} TF solutions for {} nuclei", atoms.len(), sys.z.len())));
    }
    let mut e_tf = 0.0;
    for a in atoms {
        e_tf += a.energy;
    }
    e_tf += tf_correction;

    let mut scott_sum = 0.0;
    let mut scott_entries = Vec::with_capacity(sys.z.len());
    for &z in &sys.z {
        let entry = table.lookup(sys.alpha * z, sys.beta * z)?;
        scott_sum += 2.0 * z * z * entry.s;
        scott_entries.push(entry);
    }

    let (dirac, schwinger, rct) = if coeffs.corrections {
        let c_d = coeffs.dirac.ok_or(LabError::CoefficientUnset("dirac"))?;
        let c_s = coeffs.schwinger.ok_or(LabError::CoefficientUnset("schwinger"))?;
        let (mut r43, mut rct) = (0.0, 0.0);
        for a in atoms {
            r43 += a.rho_43;
            rct += a.rct;
        }
        (c_d * r43, c_s * r43, rct)
    } else {
        (0.0, 0.0, 0.0)
    };
    let total = e_tf + scott_sum + dirac + schwinger + rct;

    let z: f64 = sys.z.iter().sum();
    let h = z.powf(-1.0 / 3.0);
    let a = if sys.m() == 1 { f64::INFINITY } else { z.cbrt() * sys.min_distance() };
    let (r1, r2) = remainder_terms(h, a, sys.alpha * z)?;
    Ok(EnergyBreakdown {
        e_tf,
        scott_sum,
        dirac,
        schwinger,
        rct,
        total,
        remainder_r1: r1,
        remainder_r2: r2,
        remainder_scale: z.powf(4.0 / 3.0) * (r1 + r2),
        interpolated: scott_entries.iter().any(|e| e.provenance == Provenance::Interpolated),
        scott_entries,
        coefficients: *coeffs,
    })
}

/// `(R1, R2)` exactly as the piecewise formulas read; `a = inf` is allowed.
pub fn remainder_terms(h: f64, a: f64, kappa: f64) -> Result<(f64, f64)> {
    let h2 = h * h;
    if !(a >= h2) {
        return Err(LabError::RegimeViolation { a, h2 });
    }
    let log_term = if kappa == 0.0 { 0.0 } else { kappa * kappa.ln().abs().cbrt() };
    let r1 = if a >= 1.0 {
        1.0 / h + log_term * h.powf(-4.0 / 3.0)
    } else {
        a.powf(-0.5) / h + log_term * a.powf(-1.0 / 3.0) * h.powf(-4.0 / 3.0)
    };
    let r2 = if a >= h.ln().abs().cbrt() {
        kappa / h2 * a.powi(-3)
    } else {
        kappa / h2 / (h2 / a).ln().abs()
    };
    Ok((r1, r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    pub c: f64,
    pub delta: f64,
    pub delta_prime: f64,
    pub c0: f64,
    pub c1: f64,
    /// Symbol left undefined where the ionisation bound for ions is stated.
    pub b: Option<f64>,
}

impl Default for BoundConstants {
    fn default() -> Self {
        BoundConstants { c: 1.0, delta: 0.1, delta_prime: 0.1, c0: 1.0, c1: 1.0, b: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceBranch {
    Close,
    Separated,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub z: f64,
    pub n: f64,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub constants: BoundConstants,
    pub branch: DistanceBranch,
    pub excess_charge: f64,
    pub excess_charge_actual: f64,
    pub excess_charge_separated: f64,
    pub ionization_fixed: f64,
    pub ionization_free: f64,
    pub ionization_applicable: bool,
    pub ion_ionization: f64,
    pub ion_applicable: bool,
    pub stability_threshold: f64,
    pub stability_allowed: bool,
    pub min_distance: f64,
    pub warnings: Vec<String>,
}

/// Every right-hand side evaluated verbatim; `Z` is the total charge and
/// `d = inf` for a single nucleus.
pub fn bounds_report(sys: &PhysicalSystem, k: &BoundConstants) -> BoundReport {
    let z: f64 = sys.z.iter().sum();
    let n = sys.n;
    let d = if sys.m() == 1 { f64::INFINITY } else { sys.min_distance() };
    let az = sys.alpha * z;
    let z57 = z.powf(5.0 / 7.0);
    let branch = if d <= z.powf(-1.0 / 3.0) { DistanceBranch::Close } else { DistanceBranch::Separated };
    let factor = match branch {
        DistanceBranch::Close => 1.0,
        DistanceBranch::Separated => z.powf(-k.delta) + (d * z.cbrt()).powf(-k.delta) + az.powf(k.delta),
    };
    let ion_factor = match branch {
        DistanceBranch::Close => 1.0,
        DistanceBranch::Separated => z.powf(-k.delta) + (d * z.cbrt()).powf(-k.delta),
    };
    let free = z57 * (z.powf(-k.delta) + az.powf(k.delta));
    let mut warnings = Vec::new();
    let ion_applicable = n <= z - k.c0 * z57;
    match k.b {
        None => warnings.push("b is undefined in the source; ion ionisation bound reported without its assumption".into()),
        Some(b) => {
            let need = k.c1 * (z - n).abs().powf(-1.0 / 3.0);
            warnings.push(format!("b is undefined in the source; user value {b} against C1 |Z-N|^(-1/3) = {need}"));
        }
    }
    BoundReport {
        z,
        n,
        d,
        alpha: sys.alpha,
        beta: sys.beta,
        constants: *k,
        branch,
        excess_charge: k.c * z57 * factor,
        excess_charge_actual: (n - z).max(0.0),
        excess_charge_separated: free,
        ionization_fixed: k.c * z.powf(20.0 / 21.0),
        ionization_free: z.powf(20.0 / 21.0) * (z.powf(-k.delta_prime) + az.powf(k.delta_prime)),
        ionization_applicable: n >= z - k.c0 * z57,
        ion_ionization: k.c * (z - n).max(0.0).powf(17.0 / 18.0) * z.powf(5.0 / 18.0) * ion_factor,
        ion_applicable,
        stability_threshold: free,
        stability_allowed: z - n <= free,
        min_distance: (z.powf(-5.0 / 21.0 + k.delta))
            .min(z.powf(-5.0 / 21.0) * az.powf(-k.delta))
            .min(sys.alpha.powf(-0.25) * z.powf(-0.5)),
        warnings,
    }
}
