use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram_estimator::EstimatorConfig;

/// Data-generating distribution. Every variant is centered with population
/// Gram matrix `R diag(spectrum) R^T` for a seeded rotation `R`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    #[default]
    Gaussian,
    /// Independent Student-t coordinates (in the rotated basis) rescaled to
    /// unit variance. Needs `dof > 4` for finite fourth moments.
    StudentT { dof: f64 },
    /// Gaussian data in which a `rate` fraction of points is multiplied by
    /// `scale`. The reported Gram matrix is that of the clean component.
    Contaminated { rate: f64, scale: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

/// A Monte Carlo experiment, read from TOML.
///
/// ```toml
/// n = 2000
/// trials = 200
/// root_seed = 1
/// spectrum = [4.0, 2.0, 1.0, 0.5, 0.25]
/// projector_rank = 1
///
/// [distribution]
/// kind = "student_t"
/// dof = 8.0
///
/// [estimator]
/// epsilon = 0.05
///
/// [estimator.net]
/// strategy = "randomized"
/// size = 500
/// delta = 0.05
///
/// [output]
/// report = "coverage.json"
/// summary = "coverage.csv"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distribution: Distribution,
    /// Population eigenvalues; the dimension is its length.
    pub spectrum: Vec<f64>,
    /// Optional explicit dimension, checked against `spectrum`.
    pub d: Option<usize>,
    pub n: usize,
    pub trials: usize,
    pub root_seed: u64,
    /// Rank `r` of the projector and ramp events.
    pub projector_rank: usize,
    /// Probe count for the empirical covering radius of the net.
    pub net_probes: usize,
    pub estimator: EstimatorConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            distribution: Distribution::Gaussian,
            spectrum: vec![4.0, 2.0, 1.0, 0.5, 0.25],
            d: None,
            n: 2000,
            trials: 200,
            root_seed: 0,
            projector_rank: 1,
            net_probes: 2000,
            estimator: EstimatorConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    /// The spectrum sorted in non-increasing order.
    pub fn sorted_spectrum(&self) -> Vec<f64> {
        let mut s = self.spectrum.clone();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.spectrum.is_empty() {
            return Err(Error::param("spectrum", "need at least one eigenvalue"));
        }
        if self.spectrum.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
            return Err(Error::param(
                "spectrum",
                "eigenvalues must be finite and >= 0",
            ));
        }
        if self.spectrum.iter().all(|&l| l == 0.0) {
            return Err(Error::param("spectrum", "spectrum is identically zero"));
        }
        if let Some(d) = self.d {
            if d != self.spectrum.len() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: self.spectrum.len(),
                });
            }
        }
        if self.n == 0 {
            return Err(Error::param("n", "sample size must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials", "need at least one trial"));
        }
        if self.projector_rank == 0 || self.projector_rank > self.dim() {
            return Err(Error::RankOutOfRange {
                r: self.projector_rank,
                max: self.dim(),
            });
        }
        match self.distribution {
            Distribution::Gaussian => {}
            Distribution::StudentT { dof } => {
                if !(dof > 4.0) {
                    return Err(Error::param("dof", format!("must exceed 4, got {dof}")));
                }
            }
            Distribution::Contaminated { rate, scale } => {
                if !(0.0..0.5).contains(&rate) {
                    return Err(Error::param(
                        "rate",
                        format!("must lie in [0, 1/2), got {rate}"),
                    ));
                }
                if !scale.is_finite() {
                    return Err(Error::param("scale", "must be finite"));
                }
            }
        }
        let eps = self.estimator.epsilon;
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::param(
                "epsilon",
                format!("must lie in (0, 1/2), got {eps}"),
            ));
        }
        Ok(())
    }
}
