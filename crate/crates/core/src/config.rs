//! TOML configuration.
//!
//! ```toml
//! M = 1                 # optional, must match the length of Z
//! Z = [1.0]
//! Y = [[0.0, 0.0, 0.0]] # optional for one nucleus
//! N = 1.0
//! alpha = 0.0
//! beta = 0.0
//! q = 2
//! eps = 0.01
//! kappa_star = 0.1
//! tf_correction = 0.0
//! scott_table = "scott.csv"   # relative to the config file
//!
//! [coefficients]
//! corrections = true
//! dirac = -0.7386
//! schwinger = -0.1641
//! counterterm = "leading_large_w"
//!
//! [constants]
//! c = 1.0
//! delta = 0.1
//! delta_prime = 0.1
//! c0 = 1.0
//! c1 = 1.0
//! b = 1.0
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::assemble::{BoundConstants, Coefficients};
use crate::error::{LabError, Result};
use crate::params::{PhysicalSystem, Thresholds};
use crate::phase_space::Counterterm;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "Z")]
    pub z: Vec<f64>,
    #[serde(rename = "Y", default)]
    pub y: Vec<[f64; 3]>,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_q")]
    pub q: u32,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default = "default_kappa_star")]
    pub kappa_star: f64,
    #[serde(default)]
    pub tf_correction: f64,
    pub scott_table: Option<PathBuf>,
    #[serde(default)]
    pub coefficients: CoefficientSection,
    #[serde(default)]
    pub constants: BoundConstants,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_q() -> u32 {
    2
}
fn default_eps() -> f64 {
    0.01
}
fn default_kappa_star() -> f64 {
    0.1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSection {
    #[serde(default = "yes")]
    pub corrections: bool,
    pub dirac: Option<f64>,
    pub schwinger: Option<f64>,
    #[serde(default)]
    pub counterterm: Counterterm,
}

fn yes() -> bool {
    true
}

impl Default for CoefficientSection {
    fn default() -> Self {
        CoefficientSection { corrections: true, dirac: None, schwinger: None, counterterm: Counterterm::default() }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn system(&self) -> Result<PhysicalSystem> {
        if let Some(m) = self.m {
            if m != self.z.len() {
                return Err(LabError::Config(format!("M = {m} but {} charges given", self.z.len())));
            }
        }
        let y = if self.y.is_empty() && self.z.len() == 1 { vec![[0.0; 3]] } else { self.y.clone() };
        Ok(PhysicalSystem { z: self.z.clone(), y, n: self.n, alpha: self.alpha, beta: self.beta, q: self.q })
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds { eps: self.eps, kappa_star: self.kappa_star }
    }

    /// Unset coefficients take the standard values; both are echoed in outputs.
    pub fn coefficients(&self) -> Coefficients {
        let std = Coefficients::standard();
        let c = &self.coefficients;
        Coefficients {
            dirac: c.dirac.or(std.dirac),
            schwinger: c.schwinger.or(std.schwinger),
            corrections: c.corrections,
            counterterm: c.counterterm,
        }
    }

    pub fn scott_table_path(&self) -> Option<PathBuf> {
        self.scott_table.as_ref().map(|p| self.base_dir.join(p))
    }
}
