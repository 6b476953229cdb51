//! Empirical Gram matrix vs the robust estimate when 2% of the
//! observations are scaled by 100.

use robust_pca::harness::{run_comparison, Distribution, ExperimentConfig};

fn main() -> robust_pca::Result<()> {
    for distribution in [
        Distribution::Gaussian,
        Distribution::Contaminated {
            rate: 0.02,
            scale: 100.0,
        },
    ] {
        let config = ExperimentConfig {
            distribution,
            n: 2000,
            trials: 50,
            ..ExperimentConfig::default()
        };
        let report = run_comparison(&config)?;
        println!("{distribution:?}");
        for s in &report.summaries {
            if let (Some(f), Some(o)) = (s.median_frobenius, s.median_operator) {
                println!(
                    "  {:<10} median |.|_F {f:10.4}  median |.|_inf {o:10.4}",
                    s.estimator
                );
            }
        }
        println!(
            "  robust wins (Frobenius): {:.0}%",
            100.0 * report.robust_win_rate_frobenius
        );
    }
    Ok(())
}
