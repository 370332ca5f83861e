//! Inference for two exponential populations under joint progressive
//! type-II censoring where each withdrawal stage removes the same number of
//! units from both populations.
//!
//! ```
//! use njpc::{fixtures, fit, exact_ci, Which};
//!
//! let (scheme, sample) = fixtures::proschan_scheme2();
//! let est = fit(&scheme, &sample).unwrap();
//! assert!((est.theta1_hat - 37.8).abs() < 1e-12);
//! let ci = exact_ci(&scheme, &est, Which::Theta1, 0.90).unwrap();
//! assert!(ci.lower < est.theta1_hat);
//! ```

pub mod error;
pub mod exact_dist;
pub mod failure_count;
pub mod fixtures;
pub mod hypoexp;
pub mod inference;
pub mod io;
pub mod quadrature;
pub mod sample;
pub mod scheme;
pub mod simulate;
pub mod study;

pub use error::{NjpcError, Result};
pub use exact_dist::{mle_mixture, mle_moments, MleMixture};
pub use failure_count::{failure_count_dist, FailureCountDist};
pub use hypoexp::Hypoexponential;
pub use inference::{bootstrap_ci, exact_ci, fit, CiMethod, ConfidenceInterval, MleEstimate};
pub use sample::{log_likelihood, sufficient_stats, NjpcSample, SufficientStats};
pub use scheme::{CensoringScheme, ExpParams, Which};
pub use simulate::{apply_scheme, expected_duration, generate, RngSeed, Sampler};
pub use study::{run_ci_study, run_point_study, run_study, StudyConfig, StudyReport};
