//! Confidence intervals for every eigenvalue of the Gram matrix, computed
//! from a single robust estimate.

use robust_pca::harness::{generate_sample, ExperimentConfig};
use robust_pca::pca::eigenvalue_report;
use robust_pca::{eigendecompose, estimate_gram, EstimatorConfig};

fn main() -> robust_pca::Result<()> {
    let config = ExperimentConfig {
        n: 50_000,
        ..ExperimentConfig::default()
    };
    let (sample, g_true) = generate_sample(&config, 1)?;
    let estimate = estimate_gram(&sample, &EstimatorConfig::default())?;
    let report = eigenvalue_report(&estimate)?;
    let truth = eigendecompose(&g_true)?.values;

    println!("half-width {:.4}", report.interval_halfwidth);
    for (i, ((lo, hi), l)) in report.intervals().iter().zip(&truth).enumerate() {
        let inside = (*lo..=*hi).contains(l);
        println!(
            "l_{} in [{lo:8.4}, {hi:8.4}]  true {l:.4}  {}",
            i + 1,
            if inside { "covered" } else { "missed" }
        );
    }
    Ok(())
}
