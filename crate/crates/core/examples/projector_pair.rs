//! Joint geometry of two random projectors: block structure, canonical
//! bases and the distance identity for equal ranks.

use robust_pca::harness::haar_orthogonal;
use robust_pca::projector_geometry::{
    analyze_pair, canonical_bases, projector_distance, ranks_equal, restricted_distance,
    DEFAULT_TOL,
};
use robust_pca::SymMatrix;

fn projector(d: usize, r: usize, seed: u64) -> SymMatrix {
    let u = haar_orthogonal(d, seed);
    let basis = u.columns(0, r);
    SymMatrix::new(basis * basis.transpose()).expect("symmetric")
}

fn main() -> robust_pca::Result<()> {
    let (p, q) = (projector(6, 2, 1), projector(6, 2, 2));
    let a = analyze_pair(&p, &q, DEFAULT_TOL)?;
    println!("m = {}, p = {}, q = {}, s = {}", a.m, a.p, a.q, a.s);
    println!("eigenvalues of P + Q: {:.4?}", a.sum_eigenvalues);
    let (im_p, im_q) = canonical_bases(&a, &p, &q)?;
    println!(
        "canonical bases: {} and {} vectors",
        im_p.ncols(),
        im_q.ncols()
    );
    println!("ranks equal: {}", ranks_equal(&a));
    println!("|P - Q| = {:.6}", projector_distance(&p, &q)?);
    println!("restricted distance = {:.6}", restricted_distance(&p, &q)?);

    let wide = projector(6, 3, 3);
    let b = analyze_pair(&p, &wide, DEFAULT_TOL)?;
    println!("rank 2 vs rank 3: ranks equal = {}", ranks_equal(&b));
    Ok(())
}
