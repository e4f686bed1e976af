//! Reconstruction of periodic bandlimited fields from samples taken at
//! unknown, i.i.d. uniform locations whose order is known.
//!
//! The pipeline is [`sampling::deploy`] → [`sampling::observe`] →
//! [`estimator::estimate_coeffs`]. [`asymptotics`] holds the analytic
//! covariances and their Monte Carlo checks, [`ambiguity`] the demonstration
//! that unordered samples cannot identify the field, and [`harness`] the
//! seeded experiment runners behind the `orderstat` binary.

pub mod ambiguity;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod field;
pub mod harness;
pub mod io;
pub mod mc;
pub mod sampling;

pub use error::{Error, Result};
pub use estimator::{distortion, distortion_bound, estimate_coeffs, reconstruct, CoefficientEstimate};
pub use field::{build_dft_matrix, coeffs_from_samples, random_field, samples_from_coeffs, DftMatrix, FourierCoefficients};
pub use sampling::{deploy, observe, quantile_indices, DeploymentDraw, SampleSet};
