//! Robust Gram estimate of a sample with a few wild observations, compared
//! with the empirical second-moment matrix.

use robust_pca::gram_estimator::empirical_gram;
use robust_pca::harness::{generate_sample, Distribution, ExperimentConfig};
use robust_pca::{estimate_gram, EstimatorConfig};

fn main() -> robust_pca::Result<()> {
    let config = ExperimentConfig {
        distribution: Distribution::Contaminated {
            rate: 0.02,
            scale: 100.0,
        },
        spectrum: vec![4.0, 2.0, 1.0],
        n: 5000,
        ..ExperimentConfig::default()
    };
    let (sample, g_true) = generate_sample(&config, 7)?;

    let estimate = estimate_gram(&sample, &EstimatorConfig::default())?;
    let empirical = empirical_gram(&sample);

    println!(
        "net: {} directions, delta = {}",
        estimate.net.len(),
        estimate.net.delta
    );
    println!(
        "kappa = {:.3}, s4_sq = {:.3}, sigma = {:.4}",
        estimate.params.kappa, estimate.params.s4_sq, estimate.params.sigma
    );
    println!(
        "|G_hat - G|_F     = {:.4}",
        estimate.g_hat.sub(&g_true)?.frobenius_norm()
    );
    println!(
        "|empirical - G|_F = {:.4}",
        empirical.sub(&g_true)?.frobenius_norm()
    );
    println!("G_hat = {}", estimate.g_hat.as_matrix());
    Ok(())
}
