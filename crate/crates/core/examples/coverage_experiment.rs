//! Monte Carlo coverage of the high-probability events.
//!
//! `cargo run --release --example coverage_experiment -- [n] [trials]`

use robust_pca::harness::{run_coverage, ExperimentConfig};

fn main() -> robust_pca::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(40_000);
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let mut config = ExperimentConfig {
        n,
        trials,
        ..ExperimentConfig::default()
    };
    config.estimator.epsilon = 0.05;
    config.estimator.net.size = 500;

    let report = run_coverage(&config)?;
    println!("standing assumption: {}", report.standing_assumption);
    report.write_summary_csv(std::io::stdout())?;
    println!(
        "all events >= {:.2}: {}",
        report.threshold,
        report.all_meet_threshold()
    );
    Ok(())
}
