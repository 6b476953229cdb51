//! Shrinks the robust estimate by the bound and reports the operator,
//! Frobenius and worst-case certificates.

use robust_pca::harness::{generate_sample, ExperimentConfig};
use robust_pca::pca::{
    cutoff_estimate, frobenius_certificate, operator_norm_certificate, worst_case_certificate,
};
use robust_pca::{eigendecompose, estimate_gram, EstimatorConfig};

fn main() -> robust_pca::Result<()> {
    let config = ExperimentConfig {
        n: 1_000_000,
        spectrum: vec![5.0, 3.0, 0.2, 0.1, 0.05, 0.02],
        ..ExperimentConfig::default()
    };
    let (sample, g_true) = generate_sample(&config, 3)?;
    let estimate = estimate_gram(&sample, &EstimatorConfig::default())?;
    let cut = cutoff_estimate(&estimate)?;
    println!("l_hat   = {:?}", rounded(&cut.basis.values));
    println!("l_tilde = {:?}", rounded(&cut.lambda_tilde));

    let params = &estimate.params;
    let spectrum = eigendecompose(&g_true)?.values;
    let fro = frobenius_certificate(&spectrum, params)?;
    let op = operator_norm_certificate(&spectrum, 1.0, params)?;
    let worst = worst_case_certificate(g_true.trace(), params.bound(spectrum[0]), 1.0)?;
    println!(
        "|G - G_tilde|_F = {:.4}",
        g_true.sub(&cut.g_tilde)?.frobenius_norm()
    );
    println!("Frobenius certificate {:.4} at r = {}", fro.value, fro.r);
    println!("operator certificate  {:.4} at r = {}", op.value, op.r);
    println!(
        "worst case            {:.4} at r = {}",
        worst.value, worst.r
    );
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}
