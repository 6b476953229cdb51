//! Tabulates zeta, B_*, B and the eigenvalue half-width for a few sample
//! sizes, showing where the bound stops being vacuous.

use robust_pca::bounds::{constant_c, default_sigma, grid_size, BoundParams};

fn main() -> robust_pca::Result<()> {
    let (kappa, s4_sq, epsilon, a) = (3.0, 10.0, 0.05, 1.0);
    println!("c = {:.12}", constant_c());
    println!(
        "{:>9} {:>3} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "n", "K", "sigma", "zeta(s4)", "B_*(s4)", "B(4)", "halfwidth"
    );
    for n in [2_000, 10_000, 40_000, 200_000, 1_000_000, 10_000_000] {
        let params = BoundParams {
            n,
            kappa,
            s4_sq,
            sigma: default_sigma(n, kappa, s4_sq, epsilon, a),
            delta: 0.01,
            epsilon,
            a,
            gram_frobenius: 4.6,
        };
        params.validate()?;
        println!(
            "{n:>9} {:>3} {:>10.4} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            grid_size(n, kappa, a),
            params.sigma,
            params.zeta(s4_sq)?,
            params.b_star(s4_sq),
            params.bound(4.0),
            params.eigenvalue_halfwidth(4.0),
        );
    }
    Ok(())
}
