//! Robust location estimates for the scalars `Y_i = <theta, X_i>^2`.
//!
//! Median of means: the indices `0..n` are shuffled once by a Fisher-Yates
//! pass driven by `ChaCha8Rng::seed_from_u64(seed)` (`rand`'s
//! `SliceRandom::shuffle`). The permuted sequence is cut into `k` contiguous
//! blocks, the first `n mod k` of size `n / k + 1` and the rest of size
//! `n / k`. Each block mean is summed in permutation order; the result is the
//! median of the block means (mean of the two middle values when `k` is even,
//! comparisons by `f64::total_cmp`). `k` is capped at `n`.
//!
//! Truncated mean: the root in `mu` of `sum_i psi((Y_i - mu) / width)` where
//! `psi(x) = sign(x) ln(1 + |x| + x^2 / 2)`, located by bisection on
//! `[min Y, max Y]` for at most 200 halvings.

use nalgebra::DVector;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::net::check_unit;
use crate::error::{Error, Result};
use crate::matrix::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RobustMethod {
    /// `blocks = None` selects `ceil(8 ln(1 / epsilon))`.
    MedianOfMeans { blocks: Option<usize> },
    /// `width = None` selects `sqrt(n v / (2 ln(1 / epsilon)))` with `v` the
    /// median-of-means estimate of `E Y^2`.
    TruncatedMean { width: Option<f64> },
}

impl Default for RobustMethod {
    fn default() -> Self {
        RobustMethod::MedianOfMeans { blocks: None }
    }
}

pub fn default_blocks(epsilon: f64) -> usize {
    ((8.0 * (1.0 / epsilon).ln()).ceil() as usize).max(1)
}

/// Precomputed block assignment shared by every direction.
#[derive(Debug, Clone)]
pub(crate) struct BlockPlan {
    permutation: Vec<usize>,
    bounds: Vec<(usize, usize)>,
}

impl BlockPlan {
    pub(crate) fn new(n: usize, blocks: usize, seed: u64) -> Self {
        let k = blocks.clamp(1, n.max(1));
        let mut permutation: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        permutation.shuffle(&mut rng);
        let base = n / k;
        let extra = n % k;
        let mut bounds = Vec::with_capacity(k);
        let mut start = 0;
        for b in 0..k {
            let len = base + usize::from(b < extra);
            bounds.push((start, start + len));
            start += len;
        }
        BlockPlan {
            permutation,
            bounds,
        }
    }

    pub(crate) fn median_of_means(&self, values: &[f64]) -> f64 {
        let mut means: Vec<f64> = self
            .bounds
            .iter()
            .map(|&(s, e)| {
                let sum: f64 = self.permutation[s..e].iter().map(|&i| values[i]).sum();
                sum / (e - s) as f64
            })
            .collect();
        median(&mut means)
    }
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn psi(x: f64) -> f64 {
    x.signum() * (1.0 + x.abs() + 0.5 * x * x).ln()
}

/// Soft-truncated location estimate with influence function `psi` at the
/// given width.
pub fn truncated_mean(values: &[f64], width: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(width > 0.0) || !width.is_finite() {
        return Err(Error::param(
            "width",
            format!("must be positive, got {width}"),
        ));
    }
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| {
            (l.min(v), h.max(v))
        });
    if lo == hi {
        return Ok(lo);
    }
    let score = |mu: f64| -> f64 { values.iter().map(|&y| psi((y - mu) / width)).sum() };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if score(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Per-direction scalar estimator with its tuning resolved for a sample.
#[derive(Debug, Clone)]
pub(crate) enum ResolvedMethod {
    MedianOfMeans(BlockPlan),
    TruncatedMean { width: Option<f64>, plan: BlockPlan },
}

impl ResolvedMethod {
    pub(crate) fn new(method: &RobustMethod, n: usize, epsilon: f64, seed: u64) -> Result<Self> {
        match *method {
            RobustMethod::MedianOfMeans { blocks } => {
                let k = blocks.unwrap_or_else(|| default_blocks(epsilon));
                if k == 0 {
                    return Err(Error::param("blocks", "need at least one block"));
                }
                Ok(ResolvedMethod::MedianOfMeans(BlockPlan::new(n, k, seed)))
            }
            RobustMethod::TruncatedMean { width } => {
                if let Some(w) = width {
                    if !(w > 0.0) || !w.is_finite() {
                        return Err(Error::param("width", format!("must be positive, got {w}")));
                    }
                }
                Ok(ResolvedMethod::TruncatedMean {
                    width,
                    plan: BlockPlan::new(n, default_blocks(epsilon), seed),
                })
            }
        }
    }

    pub(crate) fn estimate(&self, values: &[f64], epsilon: f64) -> Result<f64> {
        match self {
            ResolvedMethod::MedianOfMeans(plan) => Ok(plan.median_of_means(values)),
            ResolvedMethod::TruncatedMean { width, plan } => {
                let w = match width {
                    Some(w) => *w,
                    None => {
                        let squares: Vec<f64> = values.iter().map(|y| y * y).collect();
                        let second = plan.median_of_means(&squares);
                        let n = values.len() as f64;
                        (n * second / (2.0 * (1.0 / epsilon).ln())).sqrt()
                    }
                };
                if !(w > 0.0) {
                    // every block has Y identically zero
                    return Ok(plan.median_of_means(values));
                }
                truncated_mean(values, w)
            }
        }
    }
}

/// Robust estimate of `theta^T G theta` from the squared projections
/// `<theta, X_i>^2`.
///
/// `epsilon` only feeds the default tuning (`blocks` / `width`); `seed`
/// drives the block assignment.
pub fn robust_quadratic_form(
    sample: &Sample,
    theta: &DVector<f64>,
    method: &RobustMethod,
    epsilon: f64,
    seed: u64,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if theta.len() != sample.dim() {
        return Err(Error::DimensionMismatch {
            expected: sample.dim(),
            found: theta.len(),
        });
    }
    check_unit(theta)?;
    let resolved = ResolvedMethod::new(method, sample.len(), epsilon, seed)?;
    let ys = squared_projections(sample, theta);
    resolved.estimate(&ys, epsilon)
}

pub(crate) fn squared_projections(sample: &Sample, theta: &DVector<f64>) -> Vec<f64> {
    sample.projections(theta).iter().map(|y| y * y).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn e1(d: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[0] = 1.0;
        v
    }

    #[test]
    fn constant_values_are_returned_exactly() {
        let sample = Sample::from_rows(&vec![vec![3.0, 1.0]; 17]).unwrap();
        let mom = RobustMethod::MedianOfMeans { blocks: Some(4) };
        let tm = RobustMethod::TruncatedMean { width: Some(2.0) };
        assert_eq!(
            robust_quadratic_form(&sample, &e1(2), &mom, 0.1, 1).unwrap(),
            9.0
        );
        assert_eq!(
            robust_quadratic_form(&sample, &e1(2), &tm, 0.1, 1).unwrap(),
            9.0
        );
        let auto = RobustMethod::TruncatedMean { width: None };
        assert_eq!(
            robust_quadratic_form(&sample, &e1(2), &auto, 0.1, 1).unwrap(),
            9.0
        );
    }

    #[test]
    fn single_outlier_is_confined_to_one_block() {
        let n = 1000;
        let mut rows = vec![vec![1.0]; n - 1];
        rows.push(vec![1e9f64.sqrt()]);
        let sample = Sample::from_rows(&rows).unwrap();
        let mom = RobustMethod::MedianOfMeans { blocks: Some(10) };
        let est = robust_quadratic_form(&sample, &e1(1), &mom, 0.1, 3).unwrap();
        assert!((1.0..=2.0).contains(&est), "{est}");

        // Oracle: block means computed by hand from the same plan.
        let plan = BlockPlan::new(n, 10, 3);
        let ys: Vec<f64> = rows.iter().map(|r| r[0] * r[0]).collect();
        let mut means: Vec<f64> = plan
            .bounds
            .iter()
            .map(|&(s, e)| {
                plan.permutation[s..e].iter().map(|&i| ys[i]).sum::<f64>() / (e - s) as f64
            })
            .collect();
        means.sort_by(f64::total_cmp);
        assert_eq!(est, 0.5 * (means[4] + means[5]));
    }

    #[test]
    fn gaussian_second_moment_within_five_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 100_000;
        let scale = 1.7;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                vec![scale * a, b]
            })
            .collect();
        let sample = Sample::from_rows(&rows).unwrap();
        let truth = scale * scale;
        for method in [
            RobustMethod::MedianOfMeans { blocks: None },
            RobustMethod::TruncatedMean { width: None },
        ] {
            let est = robust_quadratic_form(&sample, &e1(2), &method, 0.05, 9).unwrap();
            assert!((est / truth - 1.0).abs() < 0.05, "{method:?}: {est}");
        }
    }

    #[test]
    fn rejects_non_unit_direction() {
        let sample = Sample::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let theta = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(
            robust_quadratic_form(&sample, &theta, &RobustMethod::default(), 0.1, 0),
            Err(Error::NotUnitVector { .. })
        ));
    }

    #[test]
    fn blocks_capped_at_sample_size() {
        let plan = BlockPlan::new(3, 10, 0);
        assert_eq!(plan.bounds.len(), 3);
        assert_eq!(default_blocks(0.05), 24);
    }

    #[test]
    fn truncated_mean_resists_outlier() {
        let mut values = vec![1.0; 999];
        values.push(1e9);
        let t = truncated_mean(&values, 1.0).unwrap();
        assert!(t < 1.1, "{t}");
        assert!(truncated_mean(&[], 1.0).is_err());
        assert!(truncated_mean(&[1.0], 0.0).is_err());
    }
}
