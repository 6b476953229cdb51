//! Joint geometry of two orthogonal projectors.
//!
//! For orthogonal projectors `P` and `Q` the eigenvectors of `P + Q` give an
//! orthonormal basis `x_1, ..., x_d` laid out in blocks:
//!
//! | indices        | eigenvalue of `P + Q`      | subspace                    |
//! |----------------|----------------------------|-----------------------------|
//! | `1..=m`        | `l_i` in `(1, 2)`          | generic position            |
//! | `m+1..=2m`     | `2 - l_i` in `(0, 1)`      | `(P - Q) x_i`, normalized   |
//! | `2m+1..=p`     | `1`                        | `Im P` and `ker Q`          |
//! | `p+1..=q`      | `1`                        | `ker P` and `Im Q`          |
//! | `q+1..=s`      | `2`                        | `Im P` and `Im Q`           |
//! | `s+1..=d`      | `0`                        | `ker P` and `ker Q`         |
//!
//! Indices in this table are 1-based; the stored boundaries `m, p, q, s` are
//! counts, so block `2m+1..=p` is the column range `2m..p` of
//! [`ProjectorPairAnalysis::basis`].

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::spectral::eigendecompose;

pub const DEFAULT_TOL: f64 = 1e-8;
const VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorPairAnalysis {
    pub dim: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub s: usize,
    /// Orthonormal eigenvectors of `P + Q` as columns, in block order.
    pub basis: DMatrix<f64>,
    /// Eigenvalue of `P + Q` attached to each basis column.
    pub sum_eigenvalues: Vec<f64>,
    pub rank_p: usize,
    pub rank_q: usize,
}

impl ProjectorPairAnalysis {
    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.basis.column(i).into_owned()
    }
}

/// Checks `M^2 = M` entrywise within `tol` (symmetry holds by construction).
pub fn check_projector(m: &SymMatrix, which: &'static str, tol: f64) -> Result<()> {
    let a = m.as_matrix();
    let residual = (a * a - a).amax();
    if residual > tol {
        return Err(Error::NotProjector { which, residual });
    }
    Ok(())
}

/// Number of eigenvalues above one half.
pub fn numerical_rank(projector: &SymMatrix) -> Result<usize> {
    Ok(eigendecompose(projector)?
        .values
        .iter()
        .filter(|&&l| l > 0.5)
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Class {
    Zero,
    Lower,
    One,
    Upper,
    Two,
}

fn classify(l: f64, tol: f64) -> Result<Class> {
    if l < -tol || l > 2.0 + tol {
        return Err(Error::AmbiguousClassification {
            eigenvalue: l,
            reason: "eigenvalue of P + Q outside [0, 2]".into(),
        });
    }
    Ok(if l.abs() <= tol {
        Class::Zero
    } else if (l - 2.0).abs() <= tol {
        Class::Two
    } else if (l - 1.0).abs() <= tol {
        Class::One
    } else if l < 1.0 {
        Class::Lower
    } else {
        Class::Upper
    })
}

fn rayleigh(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    x.dot(&(m * x))
}

/// Decomposes `R^d` along the eigenvectors of `P + Q`.
pub fn analyze_pair(
    p_mat: &SymMatrix,
    q_mat: &SymMatrix,
    tol: f64,
) -> Result<ProjectorPairAnalysis> {
    if !(tol > 0.0) || tol >= 0.5 {
        return Err(Error::param(
            "tol",
            format!("must lie in (0, 1/2), got {tol}"),
        ));
    }
    p_mat.check_same_dim(q_mat)?;
    check_projector(p_mat, "P", tol)?;
    check_projector(q_mat, "Q", tol)?;
    let d = p_mat.dim();
    let pm = p_mat.as_matrix();
    let qm = q_mat.as_matrix();
    let sum = p_mat.add(q_mat)?;
    let diff = pm - qm;
    let es = eigendecompose(&sum)?;

    let mut upper = Vec::new();
    let mut lower = 0usize;
    let mut ones = Vec::new();
    let mut twos = Vec::new();
    let mut zeros = Vec::new();
    for (i, &l) in es.values.iter().enumerate() {
        match classify(l, tol)? {
            Class::Upper => upper.push(i),
            Class::Lower => lower += 1,
            Class::One => ones.push(i),
            Class::Two => twos.push(i),
            Class::Zero => zeros.push(i),
        }
    }
    let m = upper.len();
    if lower != m {
        return Err(Error::AmbiguousClassification {
            eigenvalue: upper.first().map_or(f64::NAN, |&i| es.values[i]),
            reason: format!("{m} eigenvalues in (1, 2) but {lower} in (0, 1)"),
        });
    }

    let mut columns: Vec<DVector<f64>> = Vec::with_capacity(d);
    let mut values: Vec<f64> = Vec::with_capacity(d);
    let sum_m = sum.as_matrix();
    for &i in &upper {
        columns.push(es.vector(i));
        values.push(es.values[i]);
    }
    for k in 0..m {
        let l = values[k];
        let image = &diff * &columns[k];
        let norm = image.norm();
        if norm <= tol {
            return Err(Error::AmbiguousClassification {
                eigenvalue: l,
                reason: "(P - Q) x vanishes for an eigenvalue in (1, 2)".into(),
            });
        }
        let partner = image / norm;
        let partner_value = rayleigh(sum_m, &partner);
        if (partner_value - (2.0 - l)).abs() > tol.max(VERIFY_TOL) {
            return Err(Error::AmbiguousClassification {
                eigenvalue: l,
                reason: format!(
                    "paired vector has eigenvalue {partner_value}, expected {}",
                    2.0 - l
                ),
            });
        }
        columns.push(partner);
        values.push(partner_value);
    }

    let (in_p, in_q) = split_unit_eigenspace(pm, &es.vectors, &ones, tol)?;
    let p_end = 2 * m + in_p.len();
    let q_end = p_end + in_q.len();
    for x in in_p.into_iter().chain(in_q) {
        values.push(rayleigh(sum_m, &x));
        columns.push(x);
    }
    let s_end = q_end + twos.len();
    for &i in twos.iter().chain(&zeros) {
        columns.push(es.vector(i));
        values.push(es.values[i]);
    }
    for v in &mut values {
        *v = v.clamp(0.0, 2.0);
    }

    let rank_p = numerical_rank(p_mat)?;
    let rank_q = numerical_rank(q_mat)?;
    let block_rank_p = m + (p_end - 2 * m) + (s_end - q_end);
    let block_rank_q = m + (q_end - p_end) + (s_end - q_end);
    if block_rank_p != rank_p || block_rank_q != rank_q {
        return Err(Error::InvariantViolated(format!(
            "block counts give ranks ({block_rank_p}, {block_rank_q}), numerical ranks are ({rank_p}, {rank_q})"
        )));
    }

    Ok(ProjectorPairAnalysis {
        dim: d,
        m,
        p: p_end,
        q: q_end,
        s: s_end,
        basis: DMatrix::from_columns(&columns),
        sum_eigenvalues: values,
        rank_p,
        rank_q,
    })
}

type Vectors = Vec<DVector<f64>>;

/// Splits the eigenvalue-one eigenspace into its `Im P` and `ker P` parts by
/// diagonalizing `V^T P V` on an orthonormal basis `V` of that eigenspace.
fn split_unit_eigenspace(
    pm: &DMatrix<f64>,
    vectors: &DMatrix<f64>,
    ones: &[usize],
    tol: f64,
) -> Result<(Vectors, Vectors)> {
    if ones.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let cols: Vec<DVector<f64>> = ones
        .iter()
        .map(|&i| vectors.column(i).into_owned())
        .collect();
    let v = DMatrix::from_columns(&cols);
    let restricted = SymMatrix::new(v.transpose() * pm * &v)?;
    let inner = eigendecompose(&restricted)?;
    let mut in_p = Vec::new();
    let mut in_q = Vec::new();
    for (j, &mu) in inner.values.iter().enumerate() {
        let x = &v * inner.vector(j);
        if (mu - 1.0).abs() <= tol.sqrt() {
            in_p.push(x);
        } else if mu.abs() <= tol.sqrt() {
            in_q.push(x);
        } else {
            return Err(Error::AmbiguousClassification {
                eigenvalue: 1.0,
                reason: format!("P restricted to the unit eigenspace has eigenvalue {mu}"),
            });
        }
    }
    Ok((in_p, in_q))
}

/// Orthogonal (not normalized) bases of `Im P` and `Im Q`:
/// `(P x_1, .., P x_m, x_{2m+1}, .., x_p, x_{q+1}, .., x_s)` and
/// `(Q x_1, .., Q x_m, x_{p+1}, .., x_q, x_{q+1}, .., x_s)`, as columns.
pub fn canonical_bases(
    analysis: &ProjectorPairAnalysis,
    p_mat: &SymMatrix,
    q_mat: &SymMatrix,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if p_mat.dim() != analysis.dim || q_mat.dim() != analysis.dim {
        return Err(Error::DimensionMismatch {
            expected: analysis.dim,
            found: p_mat.dim(),
        });
    }
    let ProjectorPairAnalysis { m, p, q, s, .. } = *analysis;
    let x = |i: usize| analysis.vector(i);
    let generic_p = (0..m).map(|i| p_mat.as_matrix() * x(i));
    let generic_q = (0..m).map(|i| q_mat.as_matrix() * x(i));
    let image_p: Vec<DVector<f64>> = generic_p
        .chain((2 * m..p).map(x))
        .chain((q..s).map(x))
        .collect();
    let image_q: Vec<DVector<f64>> = generic_q
        .chain((p..q).map(x))
        .chain((q..s).map(x))
        .collect();

    verify_family(&image_p, p_mat, analysis.rank_p, "Im P")?;
    verify_family(&image_q, q_mat, analysis.rank_q, "Im Q")?;
    Ok((
        to_matrix(analysis.dim, &image_p),
        to_matrix(analysis.dim, &image_q),
    ))
}

fn to_matrix(d: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    if cols.is_empty() {
        DMatrix::zeros(d, 0)
    } else {
        DMatrix::from_columns(cols)
    }
}

fn verify_family(
    family: &[DVector<f64>],
    projector: &SymMatrix,
    rank: usize,
    label: &str,
) -> Result<()> {
    if family.len() != rank {
        return Err(Error::InvariantViolated(format!(
            "{label}: family has {} vectors, rank is {rank}",
            family.len()
        )));
    }
    for (i, u) in family.iter().enumerate() {
        let outside = (projector.as_matrix() * u - u).norm();
        if outside > VERIFY_TOL * u.norm().max(1.0) {
            return Err(Error::InvariantViolated(format!(
                "{label}: vector {i} leaves the image by {outside:e}"
            )));
        }
        for (j, w) in family.iter().enumerate().skip(i + 1) {
            let dot = u.dot(w);
            if dot.abs() > VERIFY_TOL {
                return Err(Error::InvariantViolated(format!(
                    "{label}: vectors {i} and {j} have inner product {dot:e}"
                )));
            }
        }
    }
    Ok(())
}

/// `p - 2m == q - p`: the two projectors have equal rank.
pub fn ranks_equal(analysis: &ProjectorPairAnalysis) -> bool {
    let equal = analysis.p - 2 * analysis.m == analysis.q - analysis.p;
    debug_assert_eq!(equal, analysis.rank_p == analysis.rank_q);
    equal
}

/// `|P - Q|_inf`, the square root of the top eigenvalue of `(P - Q)^2`.
pub fn projector_distance(p_mat: &SymMatrix, q_mat: &SymMatrix) -> Result<f64> {
    let diff = p_mat.sub(q_mat)?;
    let sq = SymMatrix::new(diff.as_matrix() * diff.as_matrix())?;
    Ok(eigendecompose(&sq)?.values[0].max(0.0).sqrt())
}

/// `sup |(P - Q) theta|` over unit `theta` in `Im Q`, evaluated on an
/// orthonormal basis of `Im Q`. Requires equal ranks.
pub fn restricted_distance(p_mat: &SymMatrix, q_mat: &SymMatrix) -> Result<f64> {
    p_mat.check_same_dim(q_mat)?;
    let rank_p = numerical_rank(p_mat)?;
    let q_es = eigendecompose(q_mat)?;
    let rank_q = q_es.values.iter().filter(|&&l| l > 0.5).count();
    if rank_p != rank_q {
        return Err(Error::RankMismatch {
            p: rank_p,
            q: rank_q,
        });
    }
    if rank_q == 0 {
        return Ok(0.0);
    }
    let u = q_es.vectors.columns(0, rank_q);
    let diff = p_mat.as_matrix() - q_mat.as_matrix();
    let image = &diff * u;
    let restricted = SymMatrix::new(image.transpose() * image)?;
    Ok(eigendecompose(&restricted)?.values[0].max(0.0).sqrt())
}
