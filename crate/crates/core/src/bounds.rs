//! Closed-form constants and bound functions behind every certificate.
//!
//! Everything here is a pure scalar computation on a [`BoundParams`]
//! snapshot. Infinite bounds are values, not errors: `b_star` and `bound`
//! return `f64::INFINITY` outside the region where the concentration gate
//! `[6 + 1/(kappa - 1)] zeta(max(t, sigma)) <= sqrt(n)` holds.

use std::f64::consts::{LN_2, SQRT_2};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Sample;

/// Lower clamp applied to estimated kurtosis ratios.
pub const KAPPA_FLOOR: f64 = 1.5;

/// Number of points per decade on the default sigma grid.
const SIGMA_GRID_PER_DECADE: i32 = 20;
/// Depth of the default sigma grid below `s4_sq`, in decades.
const SIGMA_GRID_DECADES: i32 = 20;

/// `c = 15 / (8 log 2 (sqrt 2 - 1)) * exp((1 + 2 sqrt 2) / 2)`.
pub fn constant_c() -> f64 {
    15.0 / (8.0 * LN_2 * (SQRT_2 - 1.0)) * ((1.0 + 2.0 * SQRT_2) / 2.0).exp()
}

/// Scalar inputs of the bound calculus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    /// Sample size.
    pub n: usize,
    /// Kurtosis ratio, `sup_theta E<theta,X>^4 / (E<theta,X>^2)^2`.
    pub kappa: f64,
    /// `E(|X|^4)^{1/2}`.
    pub s4_sq: f64,
    /// Threshold sigma, in eigenvalue units.
    pub sigma: f64,
    /// Net resolution.
    pub delta: f64,
    /// Confidence parameter; events hold with probability `1 - 2 epsilon`.
    pub epsilon: f64,
    /// Grid parameter `a > 0`.
    pub a: f64,
    /// `|G|_F`, or a plug-in proxy for it.
    pub gram_frobenius: f64,
}

impl BoundParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "sample size must be at least 1"));
        }
        if !(self.kappa >= KAPPA_FLOOR) {
            return Err(Error::param(
                "kappa",
                format!("must be >= 3/2, got {}", self.kappa),
            ));
        }
        if !(self.s4_sq > 0.0) || !self.s4_sq.is_finite() {
            return Err(Error::param(
                "s4_sq",
                format!("must be positive, got {}", self.s4_sq),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma <= self.s4_sq) {
            return Err(Error::param(
                "sigma",
                format!(
                    "must lie in (0, s4_sq = {}], got {}",
                    self.s4_sq, self.sigma
                ),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(Error::param(
                "epsilon",
                format!("must lie in (0, 1/2), got {}", self.epsilon),
            ));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::param(
                "delta",
                format!("must be >= 0, got {}", self.delta),
            ));
        }
        if !(self.a > 0.0) || !self.a.is_finite() {
            return Err(Error::param(
                "a",
                format!("must be positive, got {}", self.a),
            ));
        }
        if !(self.gram_frobenius >= 0.0) || !self.gram_frobenius.is_finite() {
            return Err(Error::param(
                "gram_frobenius",
                format!("must be >= 0, got {}", self.gram_frobenius),
            ));
        }
        Ok(())
    }

    /// `K = 1 + ceil(a^{-1} log(n / (72 (2 + c) kappa^{1/2})))`, floored at 1.
    pub fn grid_size(&self) -> u64 {
        grid_size(self.n, self.kappa, self.a)
    }

    /// `zeta(t)`; strictly decreasing on `(0, inf)`.
    pub fn zeta(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::param("t", format!("zeta needs t > 0, got {t}")));
        }
        Ok(self.zeta_unchecked(t))
    }

    fn zeta_unchecked(&self, t: f64) -> f64 {
        zeta_raw(
            t,
            self.kappa,
            self.s4_sq,
            self.epsilon,
            self.a,
            self.grid_size(),
        )
    }

    /// Limit of `zeta(t)` as `t -> inf`.
    pub fn zeta_limit(&self) -> f64 {
        (2.0 * (self.kappa - 1.0) * (self.grid_size() as f64 / self.epsilon).ln()).sqrt()
            * (self.a / 4.0).cosh()
    }

    /// `B_*(t)`: `n^{-1/2} zeta / (1 - 4 n^{-1/2} zeta)` at `max(t, sigma)`
    /// when the gate holds, `+inf` otherwise.
    pub fn b_star(&self, t: f64) -> f64 {
        let z = self.zeta_unchecked(t.max(self.sigma));
        let sqrt_n = (self.n as f64).sqrt();
        let gate = (6.0 + 1.0 / (self.kappa - 1.0)) * z;
        if !(gate <= sqrt_n) {
            return f64::INFINITY;
        }
        let scaled = z / sqrt_n;
        scaled / (1.0 - 4.0 * scaled)
    }

    /// `B(t) = 2 max(t, sigma) B_*(min(t, s4_sq)) + 7 delta |G|_F + sigma`.
    pub fn bound(&self, t: f64) -> f64 {
        let star = self.b_star(t.min(self.s4_sq));
        if star.is_infinite() {
            return f64::INFINITY;
        }
        2.0 * t.max(self.sigma) * star + 7.0 * self.delta * self.gram_frobenius + self.sigma
    }

    /// Half-width of the eigenvalue intervals computed from the largest
    /// estimated eigenvalue:
    /// `2 max(l1, sigma) B_*(min(l1, s4_sq)) + 5 delta |G|_F + sigma`.
    pub fn eigenvalue_halfwidth(&self, top_eigenvalue: f64) -> f64 {
        let star = self.b_star(top_eigenvalue.min(self.s4_sq));
        if star.is_infinite() {
            return f64::INFINITY;
        }
        2.0 * top_eigenvalue.max(self.sigma) * star
            + 5.0 * self.delta * self.gram_frobenius
            + self.sigma
    }

    /// Same half-width evaluated on the population side,
    /// `2 max(l1, sigma) B_*(l1) + 5 delta |G|_F + sigma`.
    pub fn eigenvalue_halfwidth_population(&self, top_eigenvalue: f64) -> f64 {
        let star = self.b_star(top_eigenvalue);
        if star.is_infinite() {
            return f64::INFINITY;
        }
        2.0 * top_eigenvalue.max(self.sigma) * star
            + 5.0 * self.delta * self.gram_frobenius
            + self.sigma
    }

    /// The standing assumption `8 zeta(sigma) <= sqrt(n)`.
    pub fn standing_assumption_holds(&self) -> bool {
        8.0 * self.zeta_unchecked(self.sigma) <= (self.n as f64).sqrt()
    }
}

pub fn grid_size(n: usize, kappa: f64, a: f64) -> u64 {
    let c = constant_c();
    let arg = n as f64 / (72.0 * (2.0 + c) * kappa.sqrt());
    let k = 1.0 + (arg.ln() / a).ceil();
    if k.is_finite() && k >= 1.0 {
        k as u64
    } else {
        1
    }
}

fn zeta_raw(t: f64, kappa: f64, s4_sq: f64, epsilon: f64, a: f64, k: u64) -> f64 {
    let c = constant_c();
    let root_kappa = kappa.sqrt();
    let inner =
        (2.0 + 3.0 * c) * s4_sq / (4.0 * (2.0 + c) * root_kappa * t) + (k as f64 / epsilon).ln();
    (2.0 * (kappa - 1.0) * inner).sqrt() * (a / 4.0).cosh()
        + (2.0 * (2.0 + c) * root_kappa * s4_sq / t).sqrt() * (a / 2.0).cosh()
}

/// Smallest value of the logarithmic grid `s4_sq * 10^{-j/20}` satisfying
/// `8 zeta(sigma) <= sqrt(n)`. Falls back to `s4_sq` itself when no grid
/// point qualifies; bounds are then infinite.
pub fn default_sigma(n: usize, kappa: f64, s4_sq: f64, epsilon: f64, a: f64) -> f64 {
    let k = grid_size(n, kappa, a);
    let sqrt_n = (n as f64).sqrt();
    let mut best = s4_sq;
    for j in 0..=(SIGMA_GRID_PER_DECADE * SIGMA_GRID_DECADES) {
        let candidate = s4_sq * 10f64.powf(-(j as f64) / SIGMA_GRID_PER_DECADE as f64);
        if 8.0 * zeta_raw(candidate, kappa, s4_sq, epsilon, a, k) <= sqrt_n {
            best = candidate;
        } else {
            break;
        }
    }
    best
}

/// Maximum over `directions` of the empirical ratio `m4 / m2^2` of
/// `<theta, X>`, clamped below at 3/2. Directions with zero empirical second
/// moment are skipped.
pub fn estimate_kappa(sample: &Sample, directions: &[DVector<f64>]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for theta in directions {
        if theta.len() != sample.dim() {
            return Err(Error::DimensionMismatch {
                expected: sample.dim(),
                found: theta.len(),
            });
        }
        let squares: Vec<f64> = sample.projections(theta).iter().map(|y| y * y).collect();
        if let Some(ratio) = moment_ratio(&squares) {
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
    }
    best.map(|k| k.max(KAPPA_FLOOR))
        .ok_or(Error::DegenerateKappa)
}

/// `mean(Y^2) / mean(Y)^2` for the squared projections `Y`, or `None` when
/// the second moment vanishes.
pub(crate) fn moment_ratio(squares: &[f64]) -> Option<f64> {
    let n = squares.len() as f64;
    let (m2, m4) = squares
        .iter()
        .fold((0.0, 0.0), |(m2, m4), y2| (m2 + y2, m4 + y2 * y2));
    let (m2, m4) = (m2 / n, m4 / n);
    (m2 > 0.0).then(|| m4 / (m2 * m2))
}

/// `( (1/n) sum |X_i|^4 )^{1/2}`.
pub fn estimate_s4(sample: &Sample) -> f64 {
    let n = sample.len() as f64;
    let m = sample.as_matrix();
    let total: f64 = m
        .row_iter()
        .map(|row| {
            let sq = row.norm_squared();
            sq * sq
        })
        .sum();
    (total / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> BoundParams {
        BoundParams {
            n: 100_000,
            kappa: 3.0,
            s4_sq: 1.0,
            sigma: 0.5,
            delta: 0.01,
            epsilon: 0.1,
            a: 1.0,
            gram_frobenius: 1.0,
        }
    }

    // 40-digit evaluation of the closed form with mpmath.
    #[allow(clippy::excessive_precision)]
    const C_HIGH_PRECISION: f64 = 44.287_777_205_412_794_932_845;

    #[test]
    fn constant_c_matches_high_precision_value() {
        let c = constant_c();
        assert!(((c - C_HIGH_PRECISION) / C_HIGH_PRECISION).abs() < 1e-12);
        assert!(c > 44.0 && c < 45.0);
    }

    #[test]
    fn grid_size_examples() {
        assert_eq!(grid_size(100_000, 3.0, 1.0), 4);
        assert_eq!(grid_size(10, 3.0, 1.0), 1);
        assert_eq!(grid_size(100_000, 3.0, 1e12), 2);
    }

    #[test]
    fn zeta_example_value() {
        let p = params();
        assert_eq!(p.grid_size(), 4);
        // Independent mpmath evaluation of the formula at t = 1.
        let z = p.zeta(1.0).unwrap();
        assert!((z - 18.460_560_053_982_68).abs() < 1e-9, "{z}");
        assert!(p.zeta(0.0).is_err());
        assert!(p.zeta(-1.0).is_err());
    }

    #[test]
    fn zeta_limit_at_infinity() {
        let p = params();
        let far = p.zeta(1e14).unwrap();
        assert!((far - p.zeta_limit()).abs() < 1e-5);
    }

    #[test]
    fn b_star_infinite_when_gate_fails() {
        let mut p = params();
        p.n = 4;
        assert!(p.b_star(0.0).is_infinite());
        assert!(p.b_star(1e9).is_infinite());
        assert!(p.bound(1.0).is_infinite());
    }

    #[test]
    fn b_star_at_most_quarter_under_standing_assumption() {
        let p = params();
        assert!(p.standing_assumption_holds());
        for i in 0..200 {
            let t = i as f64 * 0.05;
            assert!(p.b_star(t) <= 0.25 + 1e-12);
        }
    }

    #[test]
    fn bound_at_zero_uses_sigma_branch() {
        let p = params();
        let expected =
            2.0 * p.sigma * p.b_star(p.sigma) + 7.0 * p.delta * p.gram_frobenius + p.sigma;
        assert_eq!(p.bound(0.0), expected);
        assert_eq!(p.b_star(0.0), p.b_star(p.sigma));
    }

    #[test]
    fn validation_rejects_bad_params() {
        let mut p = params();
        p.kappa = 1.2;
        assert!(p.validate().is_err());
        let mut p = params();
        p.sigma = 2.0;
        assert!(p.validate().is_err());
        let mut p = params();
        p.epsilon = 0.5;
        assert!(p.validate().is_err());
        assert!(params().validate().is_ok());
    }

    #[test]
    fn default_sigma_meets_standing_assumption() {
        let sigma = default_sigma(100_000, 3.0, 1.0, 0.1, 1.0);
        let mut p = params();
        p.sigma = sigma;
        assert!(p.standing_assumption_holds());
        assert!(sigma <= 1.0);
        // n too small: no grid point qualifies.
        assert_eq!(default_sigma(100, 3.0, 1.0, 0.1, 1.0), 1.0);
    }

    #[test]
    fn s4_examples() {
        let unit = Sample::from_rows(&[vec![1.0, 0.0], vec![0.0, -1.0], vec![0.6, 0.8]]).unwrap();
        assert!((estimate_s4(&unit) - 1.0).abs() < 1e-15);
        let single = Sample::from_rows(&[vec![2.0, 0.0]]).unwrap();
        assert_eq!(estimate_s4(&single), 4.0);
        let pair = Sample::from_rows(&[vec![1.0], vec![3.0]]).unwrap();
        assert!((estimate_s4(&pair) - 41f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kappa_two_point_sample_is_clamped() {
        let v = DVector::from_vec(vec![0.6, 0.8]);
        let sample = Sample::from_rows(&[vec![0.6, 0.8], vec![-0.6, -0.8]]).unwrap();
        assert_eq!(estimate_kappa(&sample, &[v]).unwrap(), KAPPA_FLOOR);
    }

    #[test]
    fn kappa_requires_positive_second_moment() {
        let sample = Sample::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let ortho = DVector::from_vec(vec![0.0, 1.0]);
        assert!(matches!(
            estimate_kappa(&sample, &[ortho]),
            Err(Error::DegenerateKappa)
        ));
    }
}
