//! Least-squares fit of a symmetric matrix to quadratic-form values.

use nalgebra::{DMatrix, DVector};

use super::net::DeltaNet;
use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Relative eigenvalue floor below which the normal matrix counts as
/// ill-conditioned.
const CONDITION_FLOOR: f64 = 1e-12;
const RIDGE_SCALE: f64 = 1e-10;

/// Index of the free parameter `(i, j)` with `i <= j`: the `d` diagonal
/// entries first, then the strict upper triangle row by row.
fn param_count(d: usize) -> usize {
    d * (d + 1) / 2
}

fn design_row(theta: &DVector<f64>) -> Vec<f64> {
    let d = theta.len();
    let mut row = Vec::with_capacity(param_count(d));
    row.extend(theta.iter().map(|t| t * t));
    for i in 0..d {
        for j in (i + 1)..d {
            row.push(2.0 * theta[i] * theta[j]);
        }
    }
    row
}

fn unpack(d: usize, params: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = params[i];
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            m[(i, j)] = params[k];
            m[(j, i)] = params[k];
            k += 1;
        }
    }
    m
}

/// The symmetric `Q` minimizing `sum_theta (theta^T Q theta - r(theta))^2`.
///
/// When there are fewer directions than free entries, or the normal matrix
/// is numerically singular, a ridge `rho |Q|_F^2` is added with
/// `rho = 1e-10 * mean |r|` (or `1e-10 * tr(A^T A) / p` when every estimate
/// is zero).
pub fn fit_symmetric_matrix(net: &DeltaNet, estimates: &[f64]) -> Result<SymMatrix> {
    if estimates.len() != net.directions.len() {
        return Err(Error::DimensionMismatch {
            expected: net.directions.len(),
            found: estimates.len(),
        });
    }
    if estimates.is_empty() {
        return Err(Error::param("net", "cannot fit a matrix from an empty net"));
    }
    if estimates.iter().any(|e| !e.is_finite()) {
        return Err(Error::param(
            "estimates",
            "non-finite quadratic-form estimate",
        ));
    }
    let d = net.dim;
    let p = param_count(d);
    let mut normal = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    for (theta, &r) in net.directions.iter().zip(estimates) {
        let row = DVector::from_vec(design_row(theta));
        normal.ger(1.0, &row, &row, 1.0);
        rhs.axpy(r, &row, 1.0);
    }

    let eigenvalues = normal.clone().symmetric_eigenvalues();
    let max_eig = eigenvalues.amax();
    let min_eig = eigenvalues.min();
    let ill_conditioned = estimates.len() < p || min_eig <= CONDITION_FLOOR * max_eig;

    if ill_conditioned {
        let mean_abs = estimates.iter().map(|e| e.abs()).sum::<f64>() / estimates.len() as f64;
        let rho = if mean_abs > 0.0 {
            RIDGE_SCALE * mean_abs
        } else {
            RIDGE_SCALE * normal.trace() / p as f64
        };
        if !(rho > 0.0) {
            return Err(Error::SingularSystem);
        }
        // |Q|_F^2 counts each off-diagonal parameter twice.
        for k in 0..p {
            normal[(k, k)] += if k < d { rho } else { 2.0 * rho };
        }
    }

    let chol = normal.cholesky().ok_or(Error::SingularSystem)?;
    let solution = chol.solve(&rhs);
    if solution.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularSystem);
    }
    SymMatrix::new(unpack(d, &solution))
}
