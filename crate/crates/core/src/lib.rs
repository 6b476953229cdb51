//! Robust, dimension-free principal component analysis.
//!
//! The crate estimates the (uncentered) second-moment matrix
//! `G = E[X X^T]` of a heavy-tailed, possibly contaminated sample with a
//! robust per-direction estimator, and attaches explicit deviation bounds
//! to the eigenvalues, top-`r` projectors and smooth spectral cut-offs of
//! that estimate. The bounds depend on the data only through a handful of
//! scalar parameters ([`BoundParams`]), never on the ambient dimension.
//!
//! ```
//! use robust_pca::{estimate_gram, EstimatorConfig, Sample};
//!
//! let rows: Vec<Vec<f64>> = (0..400)
//!     .map(|i| {
//!         let t = i as f64;
//!         vec![2.0 * (0.37 * t).sin(), (1.3 * t).cos()]
//!     })
//!     .collect();
//! let sample = Sample::from_rows(&rows).unwrap();
//! let est = estimate_gram(&sample, &EstimatorConfig::default()).unwrap();
//! assert_eq!(est.g_hat.dim(), 2);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod gram_estimator;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod pca;
pub mod projector_geometry;
pub mod spectral;

pub use bounds::BoundParams;
pub use error::{Error, Result};
pub use gram_estimator::{estimate_gram, EstimatorConfig, RobustGramEstimate};
pub use matrix::{Sample, SymMatrix};
pub use spectral::{eigendecompose, EigenSystem, SpectralFunction};
