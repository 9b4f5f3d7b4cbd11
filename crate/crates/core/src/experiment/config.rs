//! Experiment configuration files.
//!
//! A config is TOML with top-level experiment keys and a `[measure]` table
//! tagged by `kind`:
//!
//! ```toml
//! n_values = [50, 100, 200]
//! trials = 50
//! master_seed = 7
//! C = 1.0
//! rho = 0.5
//! precision_bits = 53
//! output_dir = "out/disk"
//!
//! [measure]
//! kind = "uniform_disk"
//! radius = 1.0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::MeasureSpec;
use crate::mp::MIN_PRECISION;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn default_c() -> f64 {
    1.0
}
fn default_rho() -> f64 {
    0.5
}
fn default_precision() -> u32 {
    MIN_PRECISION
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("critlab-out")
}
fn default_reference_size() -> usize {
    10_000
}
fn default_failure_budget() -> f64 {
    0.05
}
fn default_coefficients() -> usize {
    4
}
fn default_prohorov_tol() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    /// Pairing balls have radius `C / n`.
    #[serde(rename = "C", default = "default_c")]
    pub c: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Starting precision of the solver; it escalates on its own.
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_reference_size")]
    pub reference_sample_size: usize,
    /// Largest tolerated fraction of failed trials.
    #[serde(default = "default_failure_budget")]
    pub failure_budget: f64,
    /// Highest `r` of the recorded `a_{nr}` (unit-circle runs).
    #[serde(default = "default_coefficients")]
    pub coefficients: usize,
    #[serde(default = "default_prohorov_tol")]
    pub prohorov_tol: f64,
    pub measure: MeasureSpec,
}

impl ExperimentConfig {
    /// A config with the defaults filled in.
    pub fn new(measure: MeasureSpec, n_values: Vec<usize>, trials: usize, master_seed: u64) -> Self {
        Self {
            n_values,
            trials,
            master_seed,
            c: default_c(),
            rho: default_rho(),
            precision_bits: default_precision(),
            output_dir: default_output_dir(),
            reference_sample_size: default_reference_size(),
            failure_budget: default_failure_budget(),
            coefficients: default_coefficients(),
            prohorov_tol: default_prohorov_tol(),
            measure,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.n_values.is_empty() {
            return bad("n_values is empty".into());
        }
        if let Some(n) = self.n_values.iter().find(|&&n| n < 2) {
            return bad(format!("every n must be at least 2, got {n}"));
        }
        let mut sorted = self.n_values.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.n_values.len() {
            return bad("n_values has duplicates".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return bad(format!("C must be positive, got {}", self.c));
        }
        if self.precision_bits < MIN_PRECISION {
            return bad(format!("precision_bits must be at least {MIN_PRECISION}"));
        }
        if self.reference_sample_size == 0 {
            return bad("reference_sample_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.failure_budget) {
            return bad(format!("failure_budget must lie in [0, 1], got {}", self.failure_budget));
        }
        if !(self.prohorov_tol > 0.0 && self.prohorov_tol < 1.0) {
            return bad(format!("prohorov_tol must lie in (0, 1), got {}", self.prohorov_tol));
        }
        self.measure.validate().map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}
