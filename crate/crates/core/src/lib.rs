//! Semi-supervised kernel two-sample testing.
//!
//! The crate implements the cross-fitted semi-supervised MMD test (`xssMMD`)
//! together with its supervised baselines: the permutation MMD test and the
//! permutation-free cross-MMD test (`xMMD`). Labeled observations `(X, V)` and
//! `(Y, W)` are tested for `P_X = P_Y`; unlabeled covariates `V`, `W` reduce
//! the variance of the projected mean difference through a cross-fitted
//! conditional-mean regression.
//!
//! Modules:
//!
//! * [`kernels`]: kernel evaluation, Gram matrices and the median heuristic.
//! * [`regression`]: k-NN and Nadaraya-Watson conditional-mean estimators and
//!   the odd/even cross-fitting split.
//! * [`stats`]: test statistics and decision rules.
//! * [`datagen`]: seeded generators for the synthetic scenarios.
//! * [`harness`]: Monte Carlo runner, CSV ingestion, reports and timing.

pub mod datagen;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod points;
pub mod regression;
pub mod stats;

pub use error::{Error, Result};
pub use kernels::{Bandwidth, Kernel, KernelKind, KernelSpec};
pub use points::Points;
pub use regression::{FittedRegressor, KnnK, Predictor, Regressor, RegressorSpec};
pub use stats::{SemiSupervisedSample, Sided, TestOutcome};
