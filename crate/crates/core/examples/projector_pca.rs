//! Top-r projector from the robust estimate, its certified error, and the
//! projected scores.

use robust_pca::harness::{generate_sample, project_data, ExperimentConfig, ProjectionBasis};
use robust_pca::pca::{projector_error_bound, top_projector, GapSource};
use robust_pca::spectral::operator_norm;
use robust_pca::{eigendecompose, estimate_gram, EstimatorConfig};

fn main() -> robust_pca::Result<()> {
    let config = ExperimentConfig {
        n: 50_000,
        spectrum: vec![6.0, 1.0, 0.5, 0.25, 0.1],
        ..ExperimentConfig::default()
    };
    let (sample, g_true) = generate_sample(&config, 2)?;
    let estimate = estimate_gram(&sample, &EstimatorConfig::default())?;
    let es_hat = eigendecompose(&estimate.g_hat)?;
    let es_true = eigendecompose(&g_true)?;

    let r = 1;
    let err = operator_norm(&top_projector(&es_true, r)?.sub(&top_projector(&es_hat, r)?)?);
    let known = projector_error_bound(
        r,
        &es_hat,
        &estimate.params,
        GapSource::True(&es_true.values),
    )?;
    let data_only = projector_error_bound(r, &es_hat, &estimate.params, GapSource::Estimated)?;
    println!("|Pi - Pi_hat| = {err:.5}");
    println!("bound with the true gap      = {known:.5}");
    println!("bound with the estimated gap = {data_only:.5}");

    let scores = project_data(&sample, &estimate, r, ProjectionBasis::Robust)?;
    let mean_sq = scores.column(0).norm_squared() / sample.len() as f64;
    println!(
        "mean squared score = {mean_sq:.4} (l_hat_1 = {:.4})",
        es_hat.values[0]
    );
    Ok(())
}
