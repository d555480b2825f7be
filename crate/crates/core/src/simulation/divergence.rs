//! Quantile diagnostics: how closely the empirical rejection-rate curve of
//! a method tracks the nominal levels, summarised by a Jensen-Shannon
//! divergence and the maximum absolute distance.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// The level grid used by the studies: 1% up to 99% in 1% steps.
pub fn default_levels() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub levels: Vec<f64>,
    /// Empirical rejection rate at each level.
    pub empirical_rates: Vec<f64>,
    /// Jensen-Shannon divergence (nats) between the nominal and empirical
    /// rejection-rate curves, compared as distributions obtained by
    /// differencing each curve over the level grid augmented with 0 and 1.
    pub js_divergence: f64,
    pub max_abs_diff: f64,
}

/// Rejection rates of `pvalues` at each level, with the divergence
/// summaries against the nominal uniform behaviour.
pub fn quantile_divergence(pvalues: &[f64], levels: &[f64]) -> Result<DivergenceReport> {
    if pvalues.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = pvalues.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::DomainError(format!("p-value {p} outside [0, 1]")));
    }
    if levels.is_empty() {
        return Err(Error::DomainError("empty level grid".into()));
    }
    for w in levels.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::DomainError(
                "levels must be strictly increasing".into(),
            ));
        }
    }
    if !(levels[0] > 0.0 && *levels.last().unwrap() < 1.0) {
        return Err(Error::DomainError("levels must lie inside (0, 1)".into()));
    }

    let mut sorted = pvalues.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut rates = Vec::with_capacity(levels.len());
    let mut idx = 0;
    for &level in levels {
        while idx < sorted.len() && sorted[idx] <= level {
            idx += 1;
        }
        rates.push(idx as f64 / n);
    }

    let max_abs_diff = rates
        .iter()
        .zip(levels)
        .map(|(r, l)| (r - l).abs())
        .fold(0.0, f64::max);

    // Difference both curves over [0, levels…, 1] to get two probability
    // vectors, then take their Jensen-Shannon divergence.
    let diffs = |curve: &[f64]| -> Vec<f64> {
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(curve.len() + 1);
        for &v in curve {
            out.push(v - prev);
            prev = v;
        }
        out.push(1.0 - prev);
        out
    };
    let q = diffs(levels);
    let r = diffs(&rates);
    let mut js = 0.0;
    for (qi, ri) in q.iter().zip(&r) {
        let mi = 0.5 * (qi + ri);
        if *qi > 0.0 {
            js += 0.5 * qi * (qi / mi).ln();
        }
        if *ri > 0.0 {
            js += 0.5 * ri * (ri / mi).ln();
        }
    }

    Ok(DivergenceReport {
        levels: levels.to_vec(),
        empirical_rates: rates,
        js_divergence: js.max(0.0),
        max_abs_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_pvalues_have_no_divergence() {
        // p-values at 0.005, 0.015, …, 0.995 hit every 1% level exactly.
        let pvalues: Vec<f64> = (0..100).map(|i| 0.005 + i as f64 / 100.0).collect();
        let rep = quantile_divergence(&pvalues, &default_levels()).unwrap();
        assert!(rep.max_abs_diff <= 0.005 + 1e-12, "{}", rep.max_abs_diff);
        assert!(rep.js_divergence < 1e-4, "{}", rep.js_divergence);
        // Rates are monotone nondecreasing.
        for w in rep.empirical_rates.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn never_rejecting_maximises_distance() {
        let pvalues = vec![1.0; 50];
        let rep = quantile_divergence(&pvalues, &default_levels()).unwrap();
        assert!((rep.max_abs_diff - 0.99).abs() < 1e-12);
        assert!(rep.js_divergence > 0.1);
    }

    #[test]
    fn deterministic() {
        let pvalues: Vec<f64> = (0..77).map(|i| ((i * 37 % 100) as f64 + 0.5) / 100.0).collect();
        let a = quantile_divergence(&pvalues, &default_levels()).unwrap();
        let b = quantile_divergence(&pvalues, &default_levels()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            quantile_divergence(&[], &default_levels()),
            Err(Error::EmptyInput)
        ));
        assert!(quantile_divergence(&[0.5, 1.5], &default_levels()).is_err());
        assert!(quantile_divergence(&[0.5], &[0.3, 0.2]).is_err());
        assert!(quantile_divergence(&[0.5], &[0.0, 0.5]).is_err());
    }
}
