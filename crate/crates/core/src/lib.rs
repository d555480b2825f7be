//! Two-sample tests for equality of population means.
//!
//! Four testing procedures — the Welch t-test, the Wilcoxon-Mann-Whitney
//! rank test, the empirical likelihood (EL) ratio test and the exponential
//! empirical likelihood (EEL, exponential tilting) test — together with the
//! calibrations that map their statistics to p-values: chi-square(1),
//! Student t with Welch-Satterthwaite degrees of freedom, standard normal,
//! bootstrap resampling under the null, the exact Wilcoxon-Mann-Whitney
//! distribution and the exact permutation distribution of the Welch
//! statistic.
//!
//! On top of the tests sit a Monte Carlo harness ([`simulation`]) for type I
//! error, power and p-value-uniformity studies over a fixed catalogue of
//! distributional scenarios ([`scenarios`]), and a row-wise batch runner
//! ([`batch`]) for expression-style matrices with a timing harness.
//!
//! Everything is deterministic: samples, bootstrap resamples and simulation
//! replications are drawn from RNG substreams derived from a master seed by
//! counter-based splitting, so results are bit-identical across runs and
//! thread counts.

pub mod batch;
pub mod calibration;
pub mod error;
pub mod rng;
pub mod scenarios;
pub mod simulation;
pub mod testing;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
