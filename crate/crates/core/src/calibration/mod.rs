//! Calibrations: the reference distributions and resampling schemes that
//! turn a test statistic into a two-sided p-value.

mod bootstrap;
mod exact;
pub mod special;

pub use bootstrap::{bootstrap_pvalue, BootstrapMethod, DEFAULT_BOOTSTRAP_RESAMPLES};
pub use exact::{
    welch_exact_pvalue, wmw_exact_distribution, wmw_exact_pvalue, ExactWmwDistribution,
    DEFAULT_EXACT_CAP,
};

use crate::testing::Method;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use special::{chi_sq1_survival, std_normal_cdf, std_normal_two_sided, student_t_two_sided};

/// Calibration tag: which reference distribution or resampling scheme maps
/// the statistic to a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CalibrationTag {
    ChiSq1,
    StudentT,
    StdNormal,
    Bootstrap(usize),
    ExactWmw,
    ExactPermutation,
}

impl CalibrationTag {
    pub fn label(&self) -> String {
        match self {
            CalibrationTag::ChiSq1 => "chisq".into(),
            CalibrationTag::StudentT => "t".into(),
            CalibrationTag::StdNormal => "normal".into(),
            CalibrationTag::Bootstrap(b) => format!("boot{b}"),
            CalibrationTag::ExactWmw => "exact".into(),
            CalibrationTag::ExactPermutation => "exact".into(),
        }
    }

    /// Validity of a (method, calibration) pairing:
    /// EL/EEL take chi-square, t or bootstrap; WMW takes normal or exact;
    /// Welch takes t, bootstrap or exact permutation.
    pub fn valid_for(&self, method: Method) -> bool {
        matches!(
            (method, self),
            (
                Method::El | Method::Eel,
                CalibrationTag::ChiSq1 | CalibrationTag::StudentT | CalibrationTag::Bootstrap(_)
            ) | (
                Method::Wmw,
                CalibrationTag::StdNormal | CalibrationTag::ExactWmw
            ) | (
                Method::Welch,
                CalibrationTag::StudentT
                    | CalibrationTag::Bootstrap(_)
                    | CalibrationTag::ExactPermutation
            )
        )
    }

    pub fn validate(&self, method: Method) -> Result<()> {
        if let CalibrationTag::Bootstrap(b) = self {
            if *b < 1 {
                return Err(Error::Validation("bootstrap B must be >= 1".into()));
            }
        }
        if self.valid_for(method) {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "calibration `{}` is not defined for method `{}`",
                self.label(),
                method
            )))
        }
    }
}

impl CalibrationTag {
    /// Calibration family without the bootstrap size: chisq, t, normal,
    /// boot or exact.
    pub fn kind_label(&self) -> &'static str {
        match self {
            CalibrationTag::ChiSq1 => "chisq",
            CalibrationTag::StudentT => "t",
            CalibrationTag::StdNormal => "normal",
            CalibrationTag::Bootstrap(_) => "boot",
            CalibrationTag::ExactWmw | CalibrationTag::ExactPermutation => "exact",
        }
    }
}

/// A testing procedure paired with a calibration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    pub calibration: CalibrationTag,
}

impl MethodSpec {
    pub fn new(method: Method, calibration: CalibrationTag) -> Result<Self> {
        calibration.validate(method)?;
        Ok(MethodSpec {
            method,
            calibration,
        })
    }

    /// Parses `method:calibration` (e.g. `welch:t`, `el:boot`,
    /// `wmw:exact`); `b` fills in the bootstrap resample count.
    pub fn parse(s: &str, b: usize) -> Result<Self> {
        let (m, c) = s
            .split_once(':')
            .ok_or_else(|| Error::Validation(format!("expected method:calibration, got `{s}`")))?;
        let method: Method = m.parse()?;
        let calibration = match c.to_ascii_lowercase().as_str() {
            "chisq" | "chi2" => CalibrationTag::ChiSq1,
            "t" => CalibrationTag::StudentT,
            "normal" => CalibrationTag::StdNormal,
            "boot" => CalibrationTag::Bootstrap(b),
            "exact" => match method {
                Method::Wmw => CalibrationTag::ExactWmw,
                _ => CalibrationTag::ExactPermutation,
            },
            other => return Err(Error::Validation(format!("unknown calibration `{other}`"))),
        };
        MethodSpec::new(method, calibration)
    }

    pub fn label(&self) -> String {
        format!("{}({})", self.method, self.calibration.kind_label())
    }

    /// Stable code identifying the pairing; used to derive RNG substreams,
    /// so it must never depend on list positions.
    pub fn code(&self) -> u64 {
        let m = match self.method {
            Method::Welch => 1,
            Method::Wmw => 2,
            Method::El => 3,
            Method::Eel => 4,
        };
        let c = match self.calibration {
            CalibrationTag::ChiSq1 => 1,
            CalibrationTag::StudentT => 2,
            CalibrationTag::StdNormal => 3,
            CalibrationTag::Bootstrap(_) => 4,
            CalibrationTag::ExactWmw => 5,
            CalibrationTag::ExactPermutation => 6,
        };
        m * 16 + c
    }
}

/// Statistic, optional degrees of freedom and p-value from one
/// (method, calibration) evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodOutcome {
    pub statistic: f64,
    pub df: Option<f64>,
    pub p: PValue,
}

/// Runs one method under one calibration. `boot_rng` drives the bootstrap
/// when the calibration asks for it; `exact_cap` bounds exact enumeration.
pub fn apply_method<R: rand::Rng>(
    spec: &MethodSpec,
    x: &crate::testing::Sample,
    y: &crate::testing::Sample,
    boot_rng: &mut R,
    exact_cap: u128,
) -> Result<MethodOutcome> {
    use crate::testing::{eel_statistic, el_statistic, welch_statistic, wmw_statistic};
    spec.calibration.validate(spec.method)?;
    match (spec.method, spec.calibration) {
        (Method::Welch, CalibrationTag::StudentT) => {
            let r = welch_statistic(x, y)?;
            Ok(MethodOutcome {
                statistic: r.t_w,
                df: Some(r.nu),
                p: pvalue_t(r.t_w, r.nu)?,
            })
        }
        (Method::Welch, CalibrationTag::Bootstrap(b)) => {
            let r = welch_statistic(x, y)?;
            let p = bootstrap_pvalue(x, y, BootstrapMethod::Welch, b, boot_rng)?;
            Ok(MethodOutcome {
                statistic: r.t_w,
                df: None,
                p,
            })
        }
        (Method::Welch, CalibrationTag::ExactPermutation) => {
            let r = welch_statistic(x, y)?;
            let p = welch_exact_pvalue(x, y, exact_cap)?;
            Ok(MethodOutcome {
                statistic: r.t_w,
                df: None,
                p,
            })
        }
        (Method::Wmw, CalibrationTag::StdNormal) => {
            let r = wmw_statistic(x, y)?;
            Ok(MethodOutcome {
                statistic: r.z,
                df: None,
                p: pvalue_normal(r.z),
            })
        }
        (Method::Wmw, CalibrationTag::ExactWmw) => {
            let r = wmw_statistic(x, y)?;
            if r.ties_present {
                return Err(Error::TiesPresent);
            }
            let p = exact::wmw_exact_pvalue_with_cap(r.u, x.len(), y.len(), exact_cap)?;
            Ok(MethodOutcome {
                statistic: r.u,
                df: None,
                p,
            })
        }
        (Method::El, CalibrationTag::ChiSq1) => {
            let r = el_statistic(x, y)?;
            Ok(MethodOutcome {
                statistic: r.lambda_stat,
                df: None,
                p: pvalue_chisq1(r.lambda_stat)?,
            })
        }
        (Method::El, CalibrationTag::StudentT) => {
            let r = el_statistic(x, y)?;
            let nu = welch_statistic(x, y)?.nu;
            Ok(MethodOutcome {
                statistic: r.lambda_stat,
                df: Some(nu),
                p: pvalue_nonparam_t(r.lambda_stat, nu)?,
            })
        }
        (Method::El, CalibrationTag::Bootstrap(b)) => {
            let r = el_statistic(x, y)?;
            let p = bootstrap_pvalue(x, y, BootstrapMethod::El, b, boot_rng)?;
            Ok(MethodOutcome {
                statistic: r.lambda_stat,
                df: None,
                p,
            })
        }
        (Method::Eel, CalibrationTag::ChiSq1) => {
            let r = eel_statistic(x, y)?;
            Ok(MethodOutcome {
                statistic: r.lambda_stat,
                df: None,
                p: pvalue_chisq1(r.lambda_stat)?,
            })
        }
        (Method::Eel, CalibrationTag::StudentT) => {
            let r = eel_statistic(x, y)?;
            let nu = welch_statistic(x, y)?.nu;
            Ok(MethodOutcome {
                statistic: r.lambda_stat,
                df: Some(nu),
                p: pvalue_nonparam_t(r.lambda_stat, nu)?,
            })
        }
        (Method::Eel, CalibrationTag::Bootstrap(b)) => {
            let r = eel_statistic(x, y)?;
            let p = bootstrap_pvalue(x, y, BootstrapMethod::Eel, b, boot_rng)?;
            Ok(MethodOutcome {
                statistic: r.lambda_stat,
                df: None,
                p,
            })
        }
        (m, c) => Err(Error::Validation(format!(
            "calibration `{}` is not defined for method `{}`",
            c.label(),
            m
        ))),
    }
}

/// A two-sided p-value and the calibration that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub calibration: CalibrationTag,
}

impl PValue {
    fn new(value: f64, calibration: CalibrationTag) -> Self {
        debug_assert!((0.0..=1.0).contains(&value));
        PValue { value, calibration }
    }
}

/// Φ(z), the standard normal CDF (absolute error below 1e-12).
pub fn std_normal(z: f64) -> f64 {
    std_normal_cdf(z)
}

/// Two-sided normal p-value 2(1 − Φ(|z|)), for the WMW statistic.
pub fn pvalue_normal(z: f64) -> PValue {
    PValue::new(std_normal_two_sided(z), CalibrationTag::StdNormal)
}

/// Two-sided t p-value 2(1 − F_{t_ν}(|t|)).
pub fn pvalue_t(t: f64, nu: f64) -> Result<PValue> {
    Ok(PValue::new(
        student_t_two_sided(t, nu)?,
        CalibrationTag::StudentT,
    ))
}

/// Upper chi-square(1) p-value for a likelihood-ratio statistic.
pub fn pvalue_chisq1(lambda: f64) -> Result<PValue> {
    Ok(PValue::new(chi_sq1_survival(lambda)?, CalibrationTag::ChiSq1))
}

/// t calibration of a nonnegative likelihood-ratio statistic:
/// p = 2(1 − F_{t_ν}(√Λ)) with ν the Welch-Satterthwaite degrees of
/// freedom of the same data.
pub fn pvalue_nonparam_t(lambda: f64, nu: f64) -> Result<PValue> {
    if lambda < 0.0 {
        return Err(Error::DomainError(format!(
            "likelihood-ratio statistic must be nonnegative (got {lambda})"
        )));
    }
    Ok(PValue::new(
        student_t_two_sided(lambda.sqrt(), nu)?,
        CalibrationTag::StudentT,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_pvalue_reference_points() {
        assert_eq!(pvalue_t(0.0, 5.0).unwrap().value, 1.0);
        assert!((pvalue_t(1.0, 1.0).unwrap().value - 0.5).abs() < 1e-12);
        // Normal limit.
        for &t in &[0.3, 1.0, 2.4] {
            let a = pvalue_t(t, 1e6).unwrap().value;
            let b = pvalue_normal(t).value;
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn chisq1_pvalue_reference_points() {
        assert_eq!(pvalue_chisq1(0.0).unwrap().value, 1.0);
        assert!((pvalue_chisq1(3.841_459).unwrap().value - 0.05).abs() < 1e-6);
        assert!(pvalue_chisq1(-1.0).is_err());
        // χ²₁ is a squared normal.
        for &z in &[0.7, 1.3, 2.9] {
            let a = pvalue_chisq1(z * z).unwrap().value;
            let b = pvalue_normal(z).value;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn nonparam_t_matches_t_on_squares() {
        for &(t, nu) in &[(0.8, 7.3), (2.1, 22.0), (3.3, 4.4)] {
            let a = pvalue_nonparam_t(t * t, nu).unwrap().value;
            let b = pvalue_t(t, nu).unwrap().value;
            assert_eq!(a, b);
        }
        assert_eq!(pvalue_nonparam_t(0.0, 9.0).unwrap().value, 1.0);
        // t → χ²₁ in the ν → ∞ limit.
        for &l in &[0.5, 2.0, 5.0] {
            let a = pvalue_nonparam_t(l, 1e6).unwrap().value;
            let b = pvalue_chisq1(l).unwrap().value;
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn calibration_validity_matrix() {
        use CalibrationTag::*;
        use Method::*;
        let cases = [
            (El, ChiSq1, true),
            (El, StudentT, true),
            (El, Bootstrap(499), true),
            (El, StdNormal, false),
            (El, ExactWmw, false),
            (Eel, ChiSq1, true),
            (Eel, ExactPermutation, false),
            (Wmw, StdNormal, true),
            (Wmw, ExactWmw, true),
            (Wmw, StudentT, false),
            (Wmw, Bootstrap(499), false),
            (Welch, StudentT, true),
            (Welch, Bootstrap(499), true),
            (Welch, ExactPermutation, true),
            (Welch, ChiSq1, false),
        ];
        for (m, c, ok) in cases {
            assert_eq!(c.valid_for(m), ok, "{m:?} {c:?}");
        }
        assert!(Bootstrap(0).validate(Welch).is_err());
    }
}
