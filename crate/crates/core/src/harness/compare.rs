use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::generate::{draw, Population};
use super::seeds::trial_seed;
use crate::error::{Error, Result};
use crate::gram_estimator::robust::median;
use crate::gram_estimator::{empirical_gram, estimate_gram};
use crate::matrix::SymMatrix;
use crate::pca::cutoff_estimate;
use crate::spectral::operator_norm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorPair {
    pub frobenius: f64,
    pub operator: f64,
}

impl ErrorPair {
    fn between(a: &SymMatrix, b: &SymMatrix) -> Result<ErrorPair> {
        let diff = a.sub(b)?;
        Ok(ErrorPair {
            frobenius: diff.frobenius_norm(),
            operator: operator_norm(&diff),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub trial: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub empirical: Option<ErrorPair>,
    pub robust: Option<ErrorPair>,
    /// Absent when the bound is infinite at the estimated parameters.
    pub cutoff: Option<ErrorPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub estimator: String,
    pub available: usize,
    pub median_frobenius: Option<f64>,
    pub median_operator: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub config: ExperimentConfig,
    pub summaries: Vec<EstimatorSummary>,
    /// Fraction of trials where `G_hat` has strictly smaller Frobenius error
    /// than the empirical Gram matrix.
    pub robust_win_rate_frobenius: f64,
    pub robust_win_rate_operator: f64,
    /// Same for `G_tilde`, over the trials where it exists.
    pub cutoff_win_rate_frobenius: Option<f64>,
    pub records: Vec<ComparisonRecord>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn compare_trial(
    config: &ExperimentConfig,
    population: &Population,
    trial: usize,
) -> ComparisonRecord {
    let seed = trial_seed(config.root_seed, trial);
    let mut record = ComparisonRecord {
        trial,
        seed,
        error: None,
        empirical: None,
        robust: None,
        cutoff: None,
    };
    let outcome = (|| -> Result<()> {
        let sample = draw(config, population, seed)?;
        record.empirical = Some(ErrorPair::between(
            &empirical_gram(&sample),
            &population.gram,
        )?);
        let est = estimate_gram(&sample, &config.estimator)?;
        record.robust = Some(ErrorPair::between(&est.g_hat, &population.gram)?);
        record.cutoff = match cutoff_estimate(&est) {
            Ok(cut) => Some(ErrorPair::between(&cut.g_tilde, &population.gram)?),
            Err(Error::InfiniteBound) => None,
            Err(e) => return Err(e),
        };
        Ok(())
    })();
    if let Err(e) = outcome {
        record.error = Some(e.to_string());
    }
    record
}

fn summarize(name: &str, pairs: Vec<ErrorPair>) -> EstimatorSummary {
    let mut f: Vec<f64> = pairs.iter().map(|p| p.frobenius).collect();
    let mut o: Vec<f64> = pairs.iter().map(|p| p.operator).collect();
    EstimatorSummary {
        estimator: name.to_string(),
        available: pairs.len(),
        median_frobenius: (!f.is_empty()).then(|| median(&mut f)),
        median_operator: (!o.is_empty()).then(|| median(&mut o)),
    }
}

/// Errors of the empirical Gram matrix, `G_hat` and `G_tilde` against the
/// population Gram matrix over independent trials.
pub fn run_comparison(config: &ExperimentConfig) -> Result<ComparisonReport> {
    config.validate()?;
    let population = Population::new(config)?;
    let records: Vec<ComparisonRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| compare_trial(config, &population, t))
        .collect();

    let trials = records.len() as f64;
    let wins = |pick: fn(&ErrorPair) -> f64| {
        records
            .iter()
            .filter(|r| match (r.robust, r.empirical) {
                (Some(a), Some(b)) => pick(&a) < pick(&b),
                _ => false,
            })
            .count() as f64
            / trials
    };
    let robust_win_rate_frobenius = wins(|p| p.frobenius);
    let robust_win_rate_operator = wins(|p| p.operator);
    let cutoff_pairs: Vec<(ErrorPair, ErrorPair)> = records
        .iter()
        .filter_map(|r| Some((r.cutoff?, r.empirical?)))
        .collect();
    let cutoff_win_rate_frobenius = (!cutoff_pairs.is_empty()).then(|| {
        cutoff_pairs
            .iter()
            .filter(|(c, e)| c.frobenius < e.frobenius)
            .count() as f64
            / cutoff_pairs.len() as f64
    });

    let summaries = vec![
        summarize(
            "empirical",
            records.iter().filter_map(|r| r.empirical).collect(),
        ),
        summarize("robust", records.iter().filter_map(|r| r.robust).collect()),
        summarize("cutoff", records.iter().filter_map(|r| r.cutoff).collect()),
    ];
    Ok(ComparisonReport {
        config: config.clone(),
        summaries,
        robust_win_rate_frobenius,
        robust_win_rate_operator,
        cutoff_win_rate_frobenius,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparison_is_deterministic() {
        let config = ExperimentConfig {
            n: 200,
            trials: 3,
            spectrum: vec![2.0, 1.0],
            ..ExperimentConfig::default()
        };
        let a = run_comparison(&config).unwrap();
        let b = run_comparison(&config).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        assert_eq!(a.records.len(), 3);
        assert!(a.records.iter().all(|r| r.error.is_none()));
    }
}
