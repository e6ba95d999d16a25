//! Recovery of the common support of jointly sparse signals observed by a
//! network of sensors that keep only the sign of each random projection.
//!
//! The pipeline has four layers:
//!
//! - [`model`] draws jointly sparse signal matrices, a shared Gaussian
//!   measurement matrix and noise, and quantizes measurements to bits.
//! - [`likelihood`] evaluates the probit negative log-likelihood of the bits,
//!   its gradient and a Lipschitz bound for that gradient.
//! - [`prox`] implements the proximal operator of the l1,∞ mixed norm, one
//!   l∞ subproblem per row, solved by bisection on a piecewise-linear
//!   equation.
//! - [`solver`] runs proximal gradient (ISTA) with geometric penalty
//!   continuation and extracts a row support from the estimate.
//!
//! [`baseline`] solves each sensor on its own and fuses the supports by
//! majority vote, and [`harness`] runs seeded Monte Carlo sweeps over the
//! number of measurements and sensors and writes the metrics as CSV.
//!
//! All row and column indices are 0-based.
//!
//! ```
//! use onebit_joint::harness::trial_rng;
//! use onebit_joint::likelihood::LikelihoodContext;
//! use onebit_joint::model::{self, NoiseModel};
//! use onebit_joint::solver::{self, ExtractionMode, SolverConfig};
//!
//! let mut rng = trial_rng(1, 60, 3, 0);
//! let phi = model::generate_measurement_matrix(60, 100, 0.004, &mut rng).unwrap();
//! let (s, truth) = model::generate_signal_matrix(100, 3, 5, &mut rng).unwrap();
//! let noise = NoiseModel::new(0.01).unwrap();
//! let y = model::sense(&phi, &s, &noise, &mut rng).unwrap();
//! let z = model::quantize(y.view()).unwrap();
//!
//! let ctx = LikelihoodContext::new(phi, z, noise.sigma_v()).unwrap();
//! let result = solver::run(&ctx, &SolverConfig::default()).unwrap();
//! let support = solver::extract_support(result.s_hat.view(), ExtractionMode::KnownK(5)).unwrap();
//! assert_eq!(support.len(), truth.len());
//! ```

// `!(x > 0.0)` is used deliberately so NaN parameters are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod error;
pub mod harness;
pub mod likelihood;
pub mod model;
pub mod prox;
pub mod solver;

pub use error::{Error, Result};
