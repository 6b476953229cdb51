//! Symmetric eigendecomposition and Lipschitz spectral functional calculus.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

const MAX_SWEEPS: usize = 10_000;

/// Eigenvalues in non-increasing order with matched orthonormal eigenvectors
/// (columns of `vectors`).
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.vectors.column(i).into_owned()
    }

    /// `U diag(values) U^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.map_values(|x| x)
    }

    /// `U diag(f(values)) U^T`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> SymMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let fv = f(v);
            scaled.column_mut(j).scale_mut(fv);
        }
        debug_assert_eq!(scaled.nrows(), d);
        SymMatrix::from_dmatrix_unchecked(scaled * self.vectors.transpose())
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted non-increasing. Each eigenvector is sign-fixed so
/// that its first non-negligible component is positive, and within clusters
/// of numerically equal eigenvalues the vectors are ordered lexicographically.
pub fn eigendecompose(m: &SymMatrix) -> Result<EigenSystem> {
    let d = m.dim();
    let eig = SymmetricEigen::try_new(m.as_matrix().clone(), f64::EPSILON, MAX_SWEEPS).ok_or(
        Error::ConvergenceFailure {
            iterations: MAX_SWEEPS,
        },
    )?;

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .total_cmp(&eig.eigenvalues[i])
            .then(i.cmp(&j))
    });

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut columns: Vec<DVector<f64>> = order
        .iter()
        .map(|&i| sign_fixed(eig.eigenvectors.column(i).into_owned()))
        .collect();

    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tie = 1e-12 * scale;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[start] - values[end]).abs() <= tie {
            end += 1;
        }
        if end - start > 1 {
            columns[start..end].sort_by(lexicographic);
        }
        start = end;
    }

    let vectors = DMatrix::from_columns(&columns);
    Ok(EigenSystem { values, vectors })
}

fn sign_fixed(mut v: DVector<f64>) -> DVector<f64> {
    if let Some(first) = v.iter().copied().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            v.neg_mut();
        }
    }
    v
}

fn lexicographic(a: &DVector<f64>, b: &DVector<f64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// A real function applied to spectra, together with its Lipschitz constant
/// `1/L`.
#[derive(Clone)]
pub struct SpectralFunction {
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lipschitz_constant: f64,
    description: String,
}

impl SpectralFunction {
    pub fn new(
        func: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz_constant: f64,
        description: impl Into<String>,
    ) -> Self {
        SpectralFunction {
            func: Arc::new(func),
            lipschitz_constant,
            description: description.into(),
        }
    }

    pub fn identity() -> Self {
        Self::new(|x| x, 1.0, "identity")
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, 0.0, format!("constant {c}"))
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        (self.func)(x)
    }

    /// The Lipschitz constant `1/L`.
    pub fn lipschitz_constant(&self) -> f64 {
        self.lipschitz_constant
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("lipschitz_constant", &self.lipschitz_constant)
            .field("description", &self.description)
            .finish()
    }
}

/// Smooth cut-off `x -> clamp((x - lower) / (upper - lower), 0, 1)`, with
/// Lipschitz constant `1 / (upper - lower)`.
pub fn make_ramp(lower: f64, upper: f64) -> Result<SpectralFunction> {
    if !(upper > lower) || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::param(
            "ramp",
            format!("upper end {upper} must exceed lower end {lower}"),
        ));
    }
    let width = upper - lower;
    Ok(SpectralFunction::new(
        move |x| ((x - lower) / width).clamp(0.0, 1.0),
        1.0 / width,
        format!("ramp from {lower} to {upper}"),
    ))
}

/// `f(M) = U diag(f(lambda_i)) U^T`.
pub fn apply_spectral_function(m: &SymMatrix, f: &SpectralFunction) -> Result<SymMatrix> {
    Ok(eigendecompose(m)?.map_values(|x| f.evaluate(x)))
}

/// `sum_{i,k} (mu_i - mu'_k)^2 <p_i, q_k>^2`, which equals `|M - M'|_F^2`.
pub fn frobenius_cross_distance_sq(a: &EigenSystem, b: &EigenSystem) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let overlaps = a.vectors.transpose() * &b.vectors;
    let mut total = 0.0;
    for (i, mu) in a.values.iter().enumerate() {
        for (k, nu) in b.values.iter().enumerate() {
            let diff = mu - nu;
            let c = overlaps[(i, k)];
            total += diff * diff * c * c;
        }
    }
    Ok(total)
}

/// Largest absolute eigenvalue.
pub fn operator_norm(m: &SymMatrix) -> f64 {
    m.as_matrix()
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Entrywise l2 norm.
pub fn frobenius_norm(m: &SymMatrix) -> f64 {
    m.frobenius_norm()
}
