//! Finite direction sets on the unit sphere.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetStrategy {
    /// Deterministic mesh with guaranteed covering radius; `d <= 3` only.
    Exhaustive,
    /// `size` directions drawn uniformly on the sphere; `delta` is nominal.
    Randomized,
    /// Randomized directions plus caller-supplied extra directions
    /// (typically eigenvectors of the empirical Gram matrix).
    EigenAugmented,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetConfig {
    pub strategy: NetStrategy,
    pub delta: f64,
    /// Number of random directions for the randomized strategies.
    pub size: usize,
    pub seed: u64,
}

impl Default for NetConfig {
    fn default() -> Self {
        NetConfig {
            strategy: NetStrategy::Randomized,
            delta: 0.05,
            size: 500,
            seed: 0,
        }
    }
}

/// A finite set of unit directions together with its resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaNet {
    pub dim: usize,
    pub delta: f64,
    pub directions: Vec<DVector<f64>>,
    pub strategy: NetStrategy,
    pub seed: u64,
}

/// Serializable summary of a net, without the directions themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetMeta {
    pub dim: usize,
    pub delta: f64,
    pub size: usize,
    pub strategy: NetStrategy,
    pub seed: u64,
}

impl DeltaNet {
    pub fn build(dim: usize, config: &NetConfig, extra: &[DVector<f64>]) -> Result<DeltaNet> {
        build_delta_net(
            dim,
            config.delta,
            config.strategy,
            config.size,
            config.seed,
            extra,
        )
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn meta(&self) -> NetMeta {
        NetMeta {
            dim: self.dim,
            delta: self.delta,
            size: self.directions.len(),
            strategy: self.strategy,
            seed: self.seed,
        }
    }

    /// Largest distance from `probes` uniformly sampled sphere points to
    /// their nearest net direction. This is an empirical lower bound on the
    /// covering radius.
    pub fn coverage_check(&self, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..probes.max(1) {
            let p = random_unit(self.dim, &mut rng);
            let nearest = self
                .directions
                .iter()
                .map(|theta| (theta - &p).norm())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(nearest);
        }
        worst
    }
}

/// Builds a net of unit directions in `R^dim`.
///
/// * exhaustive, `d = 1`: `{+1, -1}`;
/// * exhaustive, `d = 2`: `ceil(pi / asin(delta / 2))` equally spaced angles;
/// * exhaustive, `d = 3`: latitude rings every `pi / ceil(pi / delta)`
///   radians, each ring holding enough equally spaced points that every
///   sphere point is within angle `delta` (hence chord `delta`) of the mesh;
/// * randomized: `size` normalized standard Gaussian draws from a ChaCha8
///   stream seeded with `seed`;
/// * eigen-augmented: the randomized net followed by `extra` (normalized).
pub fn build_delta_net(
    dim: usize,
    delta: f64,
    strategy: NetStrategy,
    size: usize,
    seed: u64,
    extra: &[DVector<f64>],
) -> Result<DeltaNet> {
    if dim == 0 {
        return Err(Error::param("dim", "dimension must be at least 1"));
    }
    if !(delta >= 0.0) || !delta.is_finite() {
        return Err(Error::param("delta", format!("must be >= 0, got {delta}")));
    }
    let directions = match strategy {
        NetStrategy::Exhaustive => {
            if dim > 3 {
                return Err(Error::ExhaustiveNetUnsupported { dim });
            }
            if dim > 1 && !(delta > 0.0) {
                return Err(Error::param("delta", "exhaustive nets need delta > 0"));
            }
            exhaustive_directions(dim, delta)
        }
        NetStrategy::Randomized | NetStrategy::EigenAugmented => {
            if size == 0 && (strategy == NetStrategy::Randomized || extra.is_empty()) {
                return Err(Error::param(
                    "size",
                    "randomized nets need at least one direction",
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut dirs: Vec<DVector<f64>> =
                (0..size).map(|_| random_unit(dim, &mut rng)).collect();
            if strategy == NetStrategy::EigenAugmented {
                for v in extra {
                    if v.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: v.len(),
                        });
                    }
                    let norm = v.norm();
                    if norm == 0.0 {
                        continue;
                    }
                    dirs.push(v / norm);
                }
            }
            dedup(dirs)
        }
    };
    Ok(DeltaNet {
        dim,
        delta,
        directions,
        strategy,
        seed,
    })
}

fn dedup(dirs: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(dirs.len());
    for v in dirs {
        if !out.iter().any(|u| (u - &v).amax() <= UNIT_TOL) {
            out.push(v);
        }
    }
    out
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| StandardNormal.sample(rng));
        let norm: f64 = v.norm();
        if norm > 1e-300 {
            return v / norm;
        }
    }
}

fn exhaustive_directions(dim: usize, delta: f64) -> Vec<DVector<f64>> {
    match dim {
        1 => vec![DVector::from_vec(vec![1.0]), DVector::from_vec(vec![-1.0])],
        2 => {
            let half = (delta.min(2.0) / 2.0).asin();
            let count = (PI / half).ceil() as usize;
            (0..count)
                .map(|k| {
                    let angle = 2.0 * PI * k as f64 / count as f64;
                    DVector::from_vec(vec![angle.cos(), angle.sin()])
                })
                .collect()
        }
        _ => {
            let bands = (PI / delta.min(PI)).ceil() as usize;
            let step = PI / bands as f64;
            let mut dirs = Vec::new();
            for j in 0..=bands {
                let polar = j as f64 * step;
                if j == 0 || j == bands {
                    dirs.push(DVector::from_vec(vec![0.0, 0.0, polar.cos()]));
                    continue;
                }
                let lo = (polar - step / 2.0).max(0.0);
                let hi = (polar + step / 2.0).min(PI);
                let max_sin = if lo <= PI / 2.0 && PI / 2.0 <= hi {
                    1.0
                } else {
                    lo.sin().max(hi.sin())
                };
                let count = ((2.0 * PI * max_sin / delta).ceil() as usize).max(1);
                for k in 0..count {
                    let azimuth = 2.0 * PI * k as f64 / count as f64;
                    dirs.push(DVector::from_vec(vec![
                        polar.sin() * azimuth.cos(),
                        polar.sin() * azimuth.sin(),
                        polar.cos(),
                    ]));
                }
            }
            dirs
        }
    }
}

pub(crate) fn check_unit(theta: &DVector<f64>) -> Result<()> {
    let norm = theta.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(())
}
