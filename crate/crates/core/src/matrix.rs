//! Dense symmetric matrices and observation samples.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A dense symmetric `d x d` real matrix.
///
/// The entries are symmetrized on construction, `(M + M^T) / 2`, so every
/// value of this type is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    inner: DMatrix<f64>,
}

impl SymMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::param("dim", "matrix must be at least 1x1"));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("entries", "matrix has non-finite entries"));
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(SymMatrix { inner: sym })
    }

    /// Symmetrizes without validation. Used internally on products that are
    /// symmetric up to rounding.
    pub(crate) fn from_dmatrix_unchecked(m: DMatrix<f64>) -> Self {
        let sym = (&m + m.transpose()) * 0.5;
        SymMatrix { inner: sym }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::param("dim", "matrix must be at least 1x1"));
        }
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn zeros(d: usize) -> Self {
        SymMatrix {
            inner: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(d: usize) -> Self {
        SymMatrix {
            inner: DMatrix::identity(d, d),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        SymMatrix {
            inner: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    /// `v v^T`.
    pub fn outer(v: &DVector<f64>) -> Self {
        SymMatrix {
            inner: v * v.transpose(),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.inner.row(i).iter().copied().collect())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    /// `theta^T M theta`.
    pub fn quadratic_form(&self, theta: &DVector<f64>) -> f64 {
        theta.dot(&(&self.inner * theta))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_same_dim(other)?;
        Ok(SymMatrix {
            inner: &self.inner - &other.inner,
        })
    }

    pub fn add(&self, other: &SymMatrix) -> Result<SymMatrix> {
        self.check_same_dim(other)?;
        Ok(SymMatrix {
            inner: &self.inner + &other.inner,
        })
    }

    pub fn scale(&self, s: f64) -> SymMatrix {
        SymMatrix {
            inner: &self.inner * s,
        }
    }

    /// Embeds the matrix in the top-left block of a `dim x dim` zero matrix.
    pub fn zero_padded(&self, dim: usize) -> Result<SymMatrix> {
        if dim < self.dim() {
            return Err(Error::param("dim", "padding cannot shrink a matrix"));
        }
        let mut m = DMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (self.dim(), self.dim()))
            .copy_from(&self.inner);
        Ok(SymMatrix { inner: m })
    }

    pub(crate) fn check_same_dim(&self, other: &SymMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

impl Serialize for SymMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SymMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(deserializer)?;
        SymMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// An i.i.d. sample stored as an `n x d` matrix, one observation per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    data: DMatrix<f64>,
}

impl Sample {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::EmptySample);
        }
        if data.ncols() == 0 {
            return Err(Error::param(
                "dim",
                "observations must have at least one coordinate",
            ));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("sample", "sample contains non-finite values"));
        }
        Ok(Sample { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptySample);
        }
        let d = rows[0].len();
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, d, |i, j| rows[i][j]))
    }

    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.data.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn row(&self, i: usize) -> DVector<f64> {
        self.data.row(i).transpose()
    }

    /// `<theta, X_i>` for every observation.
    pub fn projections(&self, theta: &DVector<f64>) -> DVector<f64> {
        &self.data * theta
    }

    /// Subtracts the sample mean from every observation.
    pub fn centered(&self) -> Sample {
        let mean = self.data.row_mean();
        let mut data = self.data.clone();
        for mut row in data.row_iter_mut() {
            row -= &mean;
        }
        Sample { data }
    }
}
