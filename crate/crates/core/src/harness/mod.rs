//! Synthetic data, Monte Carlo experiments and data projection.

mod compare;
mod config;
mod coverage;
mod generate;
pub mod seeds;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::gram_estimator::RobustGramEstimate;
use crate::matrix::{Sample, SymMatrix};
use crate::pca::cutoff_with_params;
use crate::spectral::eigendecompose;

pub use compare::{
    run_comparison, ComparisonRecord, ComparisonReport, ErrorPair, EstimatorSummary,
};
pub use config::{Distribution, ExperimentConfig, OutputConfig};
pub use coverage::{
    clopper_pearson, run_coverage, CoverageReport, EventSummary, Outcome, TrialRecord,
    CUTOFF_FROBENIUS_BOUND, EIGENVALUE_INTERVALS, EVENTS, NET_QUADRATIC_FORMS,
    NET_QUADRATIC_FORMS_G_HAT, PERTURBATION_ESTIMATED, PERTURBATION_TRUE_GAP, PROJECTOR_BOUND,
    RAMP_OPERATOR_BOUND, SHRINKAGE_BELOW_TRUTH, TOP_BOUND_INFLATION,
};
pub use generate::{generate_sample, haar_orthogonal, Population};

/// Which estimate supplies the projection axes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionBasis {
    #[default]
    Robust,
    Cutoff,
}

/// `n x r` coordinates of every observation on the top `r` eigenvectors of
/// `G_hat` (or `G_tilde`).
pub fn project_data(
    sample: &Sample,
    estimate: &RobustGramEstimate,
    r: usize,
    basis: ProjectionBasis,
) -> Result<DMatrix<f64>> {
    project_onto(sample, &estimate.g_hat, &estimate.params, r, basis)
}

/// [`project_data`] from the Gram estimate and its bound parameters alone.
pub fn project_onto(
    sample: &Sample,
    g_hat: &SymMatrix,
    params: &BoundParams,
    r: usize,
    basis: ProjectionBasis,
) -> Result<DMatrix<f64>> {
    let d = g_hat.dim();
    if sample.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: sample.dim(),
        });
    }
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { r, max: d });
    }
    let es = match basis {
        ProjectionBasis::Robust => eigendecompose(g_hat)?,
        ProjectionBasis::Cutoff => eigendecompose(&cutoff_with_params(g_hat, params)?.g_tilde)?,
    };
    Ok(sample.as_matrix() * es.vectors.columns(0, r))
}
