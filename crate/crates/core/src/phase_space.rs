//! Kinetic dispersions and the Fermi-gas phase-space functions built on them.
//!
//! All functions carry the `q (2 pi h)^-3` phase-space normalisation and vanish
//! identically for non-positive energies.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::quadrature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LawKind {
    NonRel,
    Rel,
}

impl std::str::FromStr for LawKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nonrel" | "tf" => Ok(LawKind::NonRel),
            "rel" | "rtf" => Ok(LawKind::Rel),
            other => Err(format!("unknown law `{other}` (expected nonrel or rel)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureLaw {
    pub kind: LawKind,
    /// Relativistic parameter; ignored for `NonRel`, and `Rel` with zero gamma
    /// behaves exactly like `NonRel`.
    pub gamma: f64,
    pub q: f64,
    pub h: f64,
}

/// Below this value of `gamma^2 w` the pressure is summed as a binomial series
/// instead of the closed form, which cancels badly there.
const SERIES_SWITCH: f64 = 0.2;

impl PressureLaw {
    pub fn nonrel(q: f64, h: f64) -> Self {
        PressureLaw { kind: LawKind::NonRel, gamma: 0.0, q, h }
    }

    pub fn rel(gamma: f64, q: f64, h: f64) -> Self {
        PressureLaw { kind: LawKind::Rel, gamma, q, h }
    }

    /// Atomic units with spin factor 2.
    pub fn atomic(kind: LawKind, gamma: f64) -> Self {
        PressureLaw { kind, gamma, q: 2.0, h: 1.0 }
    }

    fn g(&self) -> f64 {
        match self.kind {
            LawKind::NonRel => 0.0,
            LawKind::Rel => self.gamma,
        }
    }

    fn prefactor(&self) -> f64 {
        self.q / (6.0 * PI * PI * self.h.powi(3))
    }

    /// Kinetic energy at momentum `p`. The relativistic branch uses the
    /// cancellation-free form `p^2 / (sqrt(g^2 p^2 + 1) + 1)`.
    pub fn dispersion(&self, p: f64) -> f64 {
        let g = self.g();
        if g == 0.0 {
            0.5 * p * p
        } else {
            p * p / ((g * g * p * p + 1.0).sqrt() + 1.0)
        }
    }

    /// Inverse of [`dispersion`](Self::dispersion); zero for `w <= 0`.
    pub fn fermi_momentum(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let g = self.g();
        (w * (2.0 + g * g * w)).sqrt()
    }

    /// Particle density `q p_F^3 / (6 pi^2 h^3)`.
    pub fn density(&self, w: f64) -> f64 {
        self.prefactor() * self.fermi_momentum(w).powi(3)
    }

    /// Derivative of the density with respect to `w`.
    pub fn density_derivative(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let g = self.g();
        3.0 * self.prefactor() * self.fermi_momentum(w) * (1.0 + g * g * w)
    }

    pub fn pressure(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let g = self.g();
        let pre = self.prefactor();
        if g == 0.0 {
            return pre * (2.0 * w).powf(2.5) / 5.0;
        }
        let g2w = g * g * w;
        if g2w <= SERIES_SWITCH {
            let x = 0.5 * g2w;
            let mut binom = 1.0;
            let mut xk = 1.0;
            let mut sum = 0.0;
            for k in 0..200 {
                let term = binom * xk / (k as f64 + 2.5);
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
                binom *= (1.5 - k as f64) / (k as f64 + 1.0);
                xk *= x;
            }
            pre * 2f64.powf(1.5) * w.powf(2.5) * sum
        } else {
            let t = 1.0 + g2w;
            let s = (t * t - 1.0).sqrt();
            let f = t * (2.0 * t * t - 5.0) * s / 8.0 + 0.375 * t.acosh();
            pre * f / g.powi(5)
        }
    }

    /// Legendre dual of the pressure, `K(rho) = sup_w (w rho - P(w))`.
    pub fn kinetic_density(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        if self.g() == 0.0 {
            let c = 0.3 * (6.0 * PI * PI / self.q).powf(2.0 / 3.0) * self.h * self.h;
            return c * rho.powf(5.0 / 3.0);
        }
        let pf = (rho / self.prefactor()).cbrt();
        let w = self.dispersion(pf);
        w * rho - self.pressure(w)
    }

    /// Pressure by adaptive quadrature of `(w - T(p)) p^2` over the Fermi ball.
    pub fn pressure_by_quadrature(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let pf = self.fermi_momentum_by_bisection(w);
        let c = self.q / (2.0 * PI * PI * self.h.powi(3));
        c * quadrature::integrate(|p| (w - self.dispersion(p)) * p * p, 0.0, pf, 1e-14, 0.0)
    }

    pub fn density_by_quadrature(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let pf = self.fermi_momentum_by_bisection(w);
        let c = self.q / (2.0 * PI * PI * self.h.powi(3));
        c * quadrature::integrate(|p| p * p, 0.0, pf, 1e-14, 0.0)
    }

    fn fermi_momentum_by_bisection(&self, w: f64) -> f64 {
        let mut hi = 1.0;
        while self.dispersion(hi) < w {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.dispersion(mid) < w {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Regularisation applied to the relativistic pressure difference.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Counterterm {
    None,
    /// Removes the `w^4` and `w^3` terms of the large-`w` expansion, the only
    /// ones whose atomic integral diverges at the nucleus.
    #[default]
    LeadingLargeW,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelCorrection {
    pub raw: f64,
    pub regularized: f64,
}

/// `P_rel(w) - P_nonrel(w)` together with its regularised form.
pub fn rel_correction_integrand(w: f64, gamma: f64, q: f64, h: f64, scheme: Counterterm) -> RelCorrection {
    if w <= 0.0 {
        return RelCorrection { raw: 0.0, regularized: 0.0 };
    }
    let raw = PressureLaw::rel(gamma, q, h).pressure(w) - PressureLaw::nonrel(q, h).pressure(w);
    let counter = match scheme {
        Counterterm::None => 0.0,
        Counterterm::LeadingLargeW => {
            let pre = q / (6.0 * PI * PI * h.powi(3));
            pre * (gamma.powi(3) * w.powi(4) / 4.0 + gamma * w.powi(3))
        }
    };
    RelCorrection { raw, regularized: raw - counter }
}
