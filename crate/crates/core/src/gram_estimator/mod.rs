//! Robust Gram-matrix estimation.
//!
//! The pipeline is: build a direction net, estimate `theta^T G theta`
//! robustly along every direction, fit a symmetric matrix `Q` to those
//! values by least squares, and keep its positive part `G_hat = Q_+`.

mod fit;
mod net;
pub(crate) mod robust;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundParams, KAPPA_FLOOR};
use crate::error::{Error, Result};
use crate::matrix::{Sample, SymMatrix};
use crate::spectral::eigendecompose;

pub use fit::fit_symmetric_matrix;
pub use net::{build_delta_net, DeltaNet, NetConfig, NetMeta, NetStrategy};
pub use robust::{default_blocks, robust_quadratic_form, truncated_mean, RobustMethod};

use robust::{squared_projections, ResolvedMethod};

/// `(1/n) sum X_i X_i^T`.
pub fn empirical_gram(sample: &Sample) -> SymMatrix {
    let x = sample.as_matrix();
    let gram = x.transpose() * x / sample.len() as f64;
    SymMatrix::from_dmatrix_unchecked(gram)
}

/// Eigendecompose, zero the negative eigenvalues, reassemble.
pub fn positive_part(m: &SymMatrix) -> Result<SymMatrix> {
    Ok(eigendecompose(m)?.map_values(|x| x.max(0.0)))
}

/// Settings of the robust Gram estimator. Unset overrides are estimated from
/// the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorConfig {
    pub epsilon: f64,
    pub a: f64,
    /// Fixed threshold; `None` picks the smallest grid value meeting the
    /// standing assumption (see [`bounds::default_sigma`]).
    pub sigma: Option<f64>,
    pub kappa: Option<f64>,
    pub s4_sq: Option<f64>,
    /// Defaults to `|G_hat|_F`.
    pub gram_frobenius: Option<f64>,
    /// Seed of the block assignment shared by all directions.
    pub block_seed: u64,
    pub net: NetConfig,
    pub method: RobustMethod,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            epsilon: 0.05,
            a: 1.0,
            sigma: None,
            kappa: None,
            s4_sq: None,
            gram_frobenius: None,
            block_seed: 0,
            net: NetConfig::default(),
            method: RobustMethod::default(),
        }
    }
}

/// Output of [`estimate_gram`] with every intermediate kept.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustGramEstimate {
    pub q_matrix: SymMatrix,
    pub g_hat: SymMatrix,
    pub net: DeltaNet,
    /// Robust estimate of `theta^T G theta` for each net direction, in net order.
    pub per_direction: Vec<f64>,
    pub params: BoundParams,
}

pub fn estimate_gram(sample: &Sample, config: &EstimatorConfig) -> Result<RobustGramEstimate> {
    let d = sample.dim();
    let n = sample.len();
    if !(config.epsilon > 0.0 && config.epsilon < 0.5) {
        return Err(Error::param(
            "epsilon",
            format!("must lie in (0, 1/2), got {}", config.epsilon),
        ));
    }

    let empirical_axes = eigendecompose(&empirical_gram(sample))?;
    let axes: Vec<DVector<f64>> = (0..d).map(|i| empirical_axes.vector(i)).collect();
    let net = DeltaNet::build(d, &config.net, &axes)?;

    let method = ResolvedMethod::new(&config.method, n, config.epsilon, config.block_seed)?;
    let per_direction: Vec<(f64, Option<f64>)> = net
        .directions
        .par_iter()
        .map(|theta| {
            let ys = squared_projections(sample, theta);
            let estimate = method.estimate(&ys, config.epsilon)?;
            Ok((estimate, bounds::moment_ratio(&ys)))
        })
        .collect::<Result<_>>()?;
    let (per_direction, ratios): (Vec<f64>, Vec<Option<f64>>) = per_direction.into_iter().unzip();

    let q_matrix = fit_symmetric_matrix(&net, &per_direction)?;
    let g_hat = positive_part(&q_matrix)?;

    let kappa = match config.kappa {
        Some(k) => k,
        None => {
            let from_net = ratios
                .into_iter()
                .flatten()
                .fold(None, |acc: Option<f64>, r| {
                    Some(acc.map_or(r, |a| a.max(r)))
                });
            let from_axes = bounds::estimate_kappa(sample, &axes).ok();
            match (from_net, from_axes) {
                (None, None) => return Err(Error::DegenerateKappa),
                (a, b) => a.into_iter().chain(b).fold(KAPPA_FLOOR, f64::max),
            }
        }
    };
    let s4_sq = config.s4_sq.unwrap_or_else(|| bounds::estimate_s4(sample));
    if !(s4_sq > 0.0) {
        return Err(Error::param("s4_sq", "sample has no non-zero observation"));
    }
    let sigma = config
        .sigma
        .unwrap_or_else(|| bounds::default_sigma(n, kappa, s4_sq, config.epsilon, config.a));
    let params = BoundParams {
        n,
        kappa,
        s4_sq,
        sigma,
        delta: config.net.delta,
        epsilon: config.epsilon,
        a: config.a,
        gram_frobenius: config
            .gram_frobenius
            .unwrap_or_else(|| g_hat.frobenius_norm()),
    };
    params.validate()?;

    Ok(RobustGramEstimate {
        q_matrix,
        g_hat,
        net,
        per_direction,
        params,
    })
}
