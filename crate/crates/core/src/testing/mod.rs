//! The four two-sample test statistics: Welch, Wilcoxon-Mann-Whitney,
//! empirical likelihood and exponential empirical likelihood.
//!
//! Everything here is a pure function of its inputs; solver scratch state
//! is per call, so concurrent invocation is safe.

mod eel;
mod el;
mod rank;
mod solve;
mod welch;

pub use eel::{eel_statistic, EelResult};
pub use el::{el_lambda_solve, el_statistic, ElResult};
pub use rank::{rank_midranks, wmw_statistic, WmwResult};
pub use welch::{common_mean, welch_statistic, WelchResult};

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Testing procedure tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Welch,
    Wmw,
    El,
    Eel,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Welch => "welch",
            Method::Wmw => "wmw",
            Method::El => "el",
            Method::Eel => "eel",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "welch" => Ok(Method::Welch),
            "wmw" => Ok(Method::Wmw),
            "el" => Ok(Method::El),
            "eel" => Ok(Method::Eel),
            other => Err(Error::Validation(format!("unknown method `{other}`"))),
        }
    }
}

/// An ordered collection of observations from one group.
///
/// Construction validates that the values are finite and nonempty; length
/// requirements beyond that (e.g. n >= 2 where a variance is needed) are
/// checked by the individual statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSample("empty sample".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!("non-finite value {v}")));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty samples
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance (n − 1 divisor). Requires n >= 2.
    pub fn variance(&self) -> f64 {
        debug_assert!(self.len() >= 2);
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (self.len() as f64 - 1.0)
    }

    /// Biased sample variance (n divisor).
    pub fn biased_variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Outcome of one (method, calibration) run, as reported by the batch
/// runner and the CLI.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TestOutcome {
    pub method: Method,
    pub calibration: String,
    /// Statistic value (t_w, z, or Λ depending on the method); absent when
    /// the solver failed.
    pub statistic: Option<f64>,
    /// Degrees of freedom, for t-calibrated outcomes.
    pub df: Option<f64>,
    pub p_value: Option<f64>,
    /// Stable error name when the method or calibration failed.
    pub failure: Option<String>,
    /// Solver convergence flag (EL/EEL only; true for closed-form methods).
    pub converged: bool,
}
