use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal, StudentT};

use super::config::{Distribution, ExperimentConfig};
use super::seeds::{derive_seed, ROTATION_STREAM};
use crate::bounds::{default_sigma, BoundParams};
use crate::error::{Error, Result};
use crate::matrix::{Sample, SymMatrix};

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
pub fn haar_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(d, d, |_, _| StandardNormal.sample(&mut rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Known population quantities of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub rotation: DMatrix<f64>,
    /// Eigenvalues in non-increasing order.
    pub spectrum: Vec<f64>,
    pub gram: SymMatrix,
    /// `sup_theta E<theta,X>^4 / (E<theta,X>^2)^2`.
    pub kappa: f64,
    /// `E(|X|^4)^{1/2}`.
    pub s4_sq: f64,
}

impl Population {
    pub fn new(config: &ExperimentConfig) -> Result<Population> {
        config.validate()?;
        let spectrum = config.sorted_spectrum();
        let d = spectrum.len();
        let rotation = haar_orthogonal(d, derive_seed(config.root_seed, ROTATION_STREAM, 0));
        let mut scaled = rotation.clone();
        for (j, &l) in spectrum.iter().enumerate() {
            scaled.column_mut(j).scale_mut(l);
        }
        let gram = SymMatrix::new(scaled * rotation.transpose())?;

        // Coordinate fourth moment of the unit-variance noise.
        let m4 = match config.distribution {
            Distribution::StudentT { dof } => 3.0 * (dof - 2.0) / (dof - 4.0),
            Distribution::Gaussian | Distribution::Contaminated { .. } => 3.0,
        };
        let trace: f64 = spectrum.iter().sum();
        let trace_sq: f64 = spectrum.iter().map(|l| l * l).sum();
        let fourth = trace * trace + (m4 - 1.0) * trace_sq;
        Ok(Population {
            rotation,
            spectrum,
            gram,
            kappa: m4.max(3.0),
            s4_sq: fourth.sqrt(),
        })
    }

    /// Bound parameters built from population constants, with the same
    /// `sigma` policy as the estimator (fixed if configured, grid otherwise).
    pub fn params(&self, config: &ExperimentConfig) -> Result<BoundParams> {
        let est = &config.estimator;
        let sigma = est
            .sigma
            .unwrap_or_else(|| default_sigma(config.n, self.kappa, self.s4_sq, est.epsilon, est.a));
        let params = BoundParams {
            n: config.n,
            kappa: self.kappa,
            s4_sq: self.s4_sq,
            sigma,
            delta: est.net.delta,
            epsilon: est.epsilon,
            a: est.a,
            gram_frobenius: self.gram.frobenius_norm(),
        };
        params.validate()?;
        Ok(params)
    }
}

/// Draws `config.n` observations with the given seed and returns them with
/// the population Gram matrix of the clean component.
pub fn generate_sample(config: &ExperimentConfig, seed: u64) -> Result<(Sample, SymMatrix)> {
    let population = Population::new(config)?;
    let sample = draw(config, &population, seed)?;
    Ok((sample, population.gram))
}

pub(crate) fn draw(
    config: &ExperimentConfig,
    population: &Population,
    seed: u64,
) -> Result<Sample> {
    let n = config.n;
    let d = population.spectrum.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = match config.distribution {
        Distribution::Gaussian | Distribution::Contaminated { .. } => {
            DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))
        }
        Distribution::StudentT { dof } => {
            let t = StudentT::new(dof).map_err(|e| Error::param("dof", e.to_string()))?;
            let scale = ((dof - 2.0) / dof).sqrt();
            DMatrix::from_fn(n, d, |_, _| scale * t.sample(&mut rng))
        }
    };
    let roots = DVector::from_iterator(d, population.spectrum.iter().map(|l| l.sqrt()));
    for (j, r) in roots.iter().enumerate() {
        z.column_mut(j).scale_mut(*r);
    }
    let mut x = z * population.rotation.transpose();
    if let Distribution::Contaminated { rate, scale } = config.distribution {
        let count = (rate * n as f64).round() as usize;
        for i in index::sample(&mut rng, n, count.min(n)) {
            x.row_mut(i).scale_mut(scale);
        }
    }
    Sample::new(x)
}
