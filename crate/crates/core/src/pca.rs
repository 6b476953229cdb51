//! Certified robust PCA on top of a [`RobustGramEstimate`].
//!
//! * eigenvalue intervals around the spectrum of `G_hat`;
//! * the gap-based bound on `|Pi_r - Pi_hat_r|_inf`;
//! * the shrunk estimator `G_tilde` with eigenvalues `[l_hat - B(l_hat)]_+`;
//! * operator- and Frobenius-norm certificates for smooth cut-offs.
//!
//! Certificates return `+inf` rather than failing when `B` is infinite.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundParams;
use crate::error::{Error, Result};
use crate::gram_estimator::RobustGramEstimate;
use crate::matrix::SymMatrix;
use crate::spectral::{eigendecompose, EigenSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueReport {
    pub lambda_hat: Vec<f64>,
    /// Common half-width of every interval, computed from the top estimated
    /// eigenvalue.
    pub interval_halfwidth: f64,
    pub params: BoundParams,
}

impl EigenvalueReport {
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        self.lambda_hat
            .iter()
            .map(|l| (l - self.interval_halfwidth, l + self.interval_halfwidth))
            .collect()
    }
}

pub fn eigenvalue_report(est: &RobustGramEstimate) -> Result<EigenvalueReport> {
    let es = eigendecompose(&est.g_hat)?;
    let interval_halfwidth = est.params.eigenvalue_halfwidth(es.values[0]);
    Ok(EigenvalueReport {
        lambda_hat: es.values,
        interval_halfwidth,
        params: est.params,
    })
}

/// Orthogonal projector on the `r` leading eigenvectors.
pub fn top_projector(es: &EigenSystem, r: usize) -> Result<SymMatrix> {
    let d = es.dim();
    if r == 0 || r > d {
        return Err(Error::RankOutOfRange { r, max: d });
    }
    let basis = es.vectors.columns(0, r);
    Ok(SymMatrix::from_dmatrix_unchecked(basis * basis.transpose()))
}

/// Which spectrum supplies the gap in [`projector_error_bound`].
#[derive(Debug, Clone, Copy)]
pub enum GapSource<'a> {
    /// Known population eigenvalues (synthetic experiments).
    True(&'a [f64]),
    /// Eigenvalues of `G_hat`: the gap is shrunk by twice the interval
    /// half-width and `B` is evaluated at `l_hat_1 + halfwidth`.
    Estimated,
}

/// `sqrt(2r) B(l_1) / (l_r - l_{r+1})`, or `+inf` when the gap is not
/// positive.
pub fn projector_error_bound(
    r: usize,
    es_hat: &EigenSystem,
    params: &BoundParams,
    gap_source: GapSource<'_>,
) -> Result<f64> {
    let d = es_hat.dim();
    if r == 0 || r >= d {
        return Err(Error::RankOutOfRange {
            r,
            max: d.saturating_sub(1),
        });
    }
    let (gap, b1) = match gap_source {
        GapSource::True(lambda) => {
            if lambda.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: lambda.len(),
                });
            }
            (lambda[r - 1] - lambda[r], params.bound(lambda[0]))
        }
        GapSource::Estimated => {
            let l = &es_hat.values;
            let halfwidth = params.eigenvalue_halfwidth(l[0]);
            let gap = (l[r - 1] - l[r] - 2.0 * halfwidth).max(0.0);
            (gap, params.bound(l[0] + halfwidth))
        }
    };
    Ok(gap_bound(r, gap, b1))
}

pub(crate) fn gap_bound(r: usize, gap: f64, b1: f64) -> f64 {
    if !(gap > 0.0) || b1.is_infinite() {
        return f64::INFINITY;
    }
    (2.0 * r as f64).sqrt() * b1 / gap
}

/// The shrunk estimator `G_tilde = sum [l_hat_i - B(l_hat_i)]_+ q_i q_i^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffEstimate {
    pub g_tilde: SymMatrix,
    pub lambda_tilde: Vec<f64>,
    /// Eigendecomposition of `G_hat` that `G_tilde` is built on.
    pub basis: EigenSystem,
}

/// [`cutoff_with_bound`] using `B` from the estimate's own parameters.
pub fn cutoff_estimate(est: &RobustGramEstimate) -> Result<CutoffEstimate> {
    cutoff_with_params(&est.g_hat, &est.params)
}

pub fn cutoff_with_params(g_hat: &SymMatrix, params: &BoundParams) -> Result<CutoffEstimate> {
    let basis = eigendecompose(g_hat)?;
    cutoff_with_bound(basis, |t| params.bound(t))
}

/// Shrinks every eigenvalue of `basis` by `bound(l_hat)` and clips at zero.
/// Fails with [`Error::InfiniteBound`] if the bound is infinite anywhere on
/// the spectrum.
pub fn cutoff_with_bound(basis: EigenSystem, bound: impl Fn(f64) -> f64) -> Result<CutoffEstimate> {
    let mut lambda_tilde = Vec::with_capacity(basis.dim());
    for &l in &basis.values {
        let b = bound(l);
        if !b.is_finite() {
            return Err(Error::InfiniteBound);
        }
        lambda_tilde.push((l - b).max(0.0));
    }
    let mut scaled = basis.vectors.clone();
    for (j, &v) in lambda_tilde.iter().enumerate() {
        scaled.column_mut(j).scale_mut(v);
    }
    let g_tilde = SymMatrix::from_dmatrix_unchecked(scaled * basis.vectors.transpose());
    Ok(CutoffEstimate {
        g_tilde,
        lambda_tilde,
        basis,
    })
}

/// A certificate value together with the rank achieving the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub value: f64,
    pub r: usize,
}

fn check_spectrum(spectrum: &[f64]) -> Result<()> {
    if spectrum.is_empty() {
        return Err(Error::param("spectrum", "spectrum is empty"));
    }
    if spectrum.iter().any(|l| !(*l >= 0.0) || !l.is_finite()) {
        return Err(Error::param(
            "spectrum",
            "eigenvalues must be finite and non-negative",
        ));
    }
    if spectrum.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::param(
            "spectrum",
            "eigenvalues must be non-increasing",
        ));
    }
    Ok(())
}

/// `tail[r] = sum_{i > r} l_i^2` for `r = 0..=d` (1-based `i`).
fn tail_squares(spectrum: &[f64]) -> Vec<f64> {
    let d = spectrum.len();
    let mut tails = vec![0.0; d + 1];
    for r in (0..d).rev() {
        tails[r] = tails[r + 1] + spectrum[r] * spectrum[r];
    }
    tails
}

fn scan_min(d: usize, term: impl Fn(usize) -> f64) -> Certificate {
    let mut best = Certificate {
        value: f64::INFINITY,
        r: 1,
    };
    for r in 1..=d {
        let v = term(r);
        if v < best.value {
            best = Certificate { value: v, r };
        }
    }
    best
}

/// `min_r L^{-1} (B + sqrt(4 r B^2 + 2 sum_{i>r} l_i^2))` for a given
/// `B = B(l_1)`; `lipschitz` is `1/L`.
pub fn operator_norm_certificate_from_b(
    spectrum: &[f64],
    b1: f64,
    lipschitz: f64,
) -> Result<Certificate> {
    check_spectrum(spectrum)?;
    if b1.is_infinite() {
        return Ok(Certificate {
            value: f64::INFINITY,
            r: 1,
        });
    }
    let tails = tail_squares(spectrum);
    Ok(scan_min(spectrum.len(), |r| {
        lipschitz * (b1 + (4.0 * r as f64 * b1 * b1 + 2.0 * tails[r]).sqrt())
    }))
}

/// Operator-norm bound on `|f(G) - f(G_hat)|_inf` for `1/L`-Lipschitz `f`.
pub fn operator_norm_certificate(
    spectrum: &[f64],
    lipschitz: f64,
    params: &BoundParams,
) -> Result<Certificate> {
    check_spectrum(spectrum)?;
    operator_norm_certificate_from_b(spectrum, params.bound(spectrum[0]), lipschitz)
}

/// `min_r L^{-1} sqrt(13 r B^2 + 2 sum_{i>r} l_i^2)` for a given `B = B(l_1)`.
pub fn frobenius_certificate_from_b(
    spectrum: &[f64],
    b1: f64,
    lipschitz: f64,
) -> Result<Certificate> {
    check_spectrum(spectrum)?;
    if b1.is_infinite() {
        return Ok(Certificate {
            value: f64::INFINITY,
            r: 1,
        });
    }
    let tails = tail_squares(spectrum);
    Ok(scan_min(spectrum.len(), |r| {
        lipschitz * (13.0 * r as f64 * b1 * b1 + 2.0 * tails[r]).sqrt()
    }))
}

/// Frobenius bound on `|G - G_tilde|_F`.
pub fn frobenius_certificate(spectrum: &[f64], params: &BoundParams) -> Result<Certificate> {
    frobenius_certificate_lipschitz(spectrum, params, 1.0)
}

/// Frobenius bound on `|f(G) - f(G_tilde)|_F` for `1/L`-Lipschitz `f`.
pub fn frobenius_certificate_lipschitz(
    spectrum: &[f64],
    params: &BoundParams,
    lipschitz: f64,
) -> Result<Certificate> {
    check_spectrum(spectrum)?;
    frobenius_certificate_from_b(spectrum, params.bound(spectrum[0]), lipschitz)
}

/// Worst case over spectra with a given trace: the rank
/// `ceil(sqrt(2/13) Tr(G) / B)` (at least 1; callers cap it at `d`) and the
/// bound `L^{-1} sqrt(11 Tr(G) B + 13 B^2)`.
pub fn worst_case_certificate(trace: f64, b1: f64, lipschitz: f64) -> Result<Certificate> {
    if !(trace >= 0.0) {
        return Err(Error::param("trace", format!("must be >= 0, got {trace}")));
    }
    if !(b1 > 0.0) {
        return Err(Error::param("b1", format!("must be positive, got {b1}")));
    }
    if b1.is_infinite() {
        return Ok(Certificate {
            value: f64::INFINITY,
            r: 1,
        });
    }
    let r = ((2.0f64 / 13.0).sqrt() * trace / b1).ceil().max(1.0) as usize;
    let value = lipschitz * (11.0 * trace * b1 + 13.0 * b1 * b1).sqrt();
    Ok(Certificate { value, r })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationRow {
    /// `sum_i (l_i - l_k)^2 <q_k, p_i>^2`.
    pub true_gap_lhs: f64,
    /// `sum_i (l_i - l_hat_k)^2 <q_k, p_i>^2`.
    pub estimated_lhs: f64,
    /// `|G q_k - G_hat q_k|^2`, equal to `estimated_lhs`.
    pub residual_norm_sq: f64,
    pub true_gap_pass: bool,
    pub estimated_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub rows: Vec<PerturbationRow>,
    /// `2 B(l_1)^2`.
    pub true_gap_threshold: f64,
    /// `B(l_1)^2`.
    pub estimated_threshold: f64,
}

impl PerturbationReport {
    pub fn all_true_gap_pass(&self) -> bool {
        self.rows.iter().all(|r| r.true_gap_pass)
    }

    pub fn all_estimated_pass(&self) -> bool {
        self.rows.iter().all(|r| r.estimated_pass)
    }
}

/// Evaluates both eigenvector perturbation inequalities for every `k`,
/// using the population matrix `g_true`.
pub fn perturbation_diagnostics(
    g_true: &SymMatrix,
    g_hat: &SymMatrix,
    params: &BoundParams,
) -> Result<PerturbationReport> {
    g_true.check_same_dim(g_hat)?;
    let truth = eigendecompose(g_true)?;
    let est = eigendecompose(g_hat)?;
    let b1 = params.bound(truth.values[0]);
    let true_gap_threshold = 2.0 * b1 * b1;
    let estimated_threshold = b1 * b1;
    let overlaps = truth.vectors.transpose() * &est.vectors;
    let diff = g_true.as_matrix() - g_hat.as_matrix();

    let rows = (0..est.dim())
        .map(|k| {
            let (mut true_gap_lhs, mut estimated_lhs) = (0.0, 0.0);
            for (i, li) in truth.values.iter().enumerate() {
                let c2 = overlaps[(i, k)] * overlaps[(i, k)];
                true_gap_lhs += (li - truth.values[k]).powi(2) * c2;
                estimated_lhs += (li - est.values[k]).powi(2) * c2;
            }
            let qk: DVector<f64> = est.vector(k);
            let residual_norm_sq = (&diff * qk).norm_squared();
            PerturbationRow {
                true_gap_lhs,
                estimated_lhs,
                residual_norm_sq,
                true_gap_pass: true_gap_lhs <= true_gap_threshold,
                estimated_pass: estimated_lhs <= estimated_threshold,
            }
        })
        .collect();

    Ok(PerturbationReport {
        rows,
        true_gap_threshold,
        estimated_threshold,
    })
}
