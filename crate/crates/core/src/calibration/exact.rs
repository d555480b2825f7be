//! Exact calibrations: the Wilcoxon-Mann-Whitney count distribution from
//! its probability generating function, and the permutation distribution
//! of the Welch statistic.

use super::{CalibrationTag, PValue};
use crate::testing::{welch_statistic, Sample};
use crate::{Error, Result};

/// Default cap: pmf table entries for the WMW distribution, enumerated
/// splits for the permutation test.
pub const DEFAULT_EXACT_CAP: u128 = 1_000_000;

/// Exact probability mass of the Mann-Whitney count M over 0..=n_x·n_y.
#[derive(Debug, Clone)]
pub struct ExactWmwDistribution {
    pub n_x: usize,
    pub n_y: usize,
    pub pmf: Vec<f64>,
}

impl ExactWmwDistribution {
    /// P(M <= m).
    pub fn cdf(&self, m: usize) -> f64 {
        self.pmf.iter().take(m + 1).sum()
    }

    /// P(M >= m), evaluated as P(M <= n_x·n_y − m) through the enforced
    /// symmetry so that mirrored arguments give bit-identical tails.
    pub fn survival(&self, m: usize) -> f64 {
        self.cdf(self.n_x * self.n_y - m)
    }
}

/// Exact distribution of M by expanding its probability generating
/// function ∏_{i=n_x+1}^{n_x+n_y}(1−z^i) / ∏_{i=1}^{n_y}(1−z^i): one
/// coefficient array, multiplied by (1−z^{n_x+i})/(1−z^i) for i = 1..n_y,
/// renormalised whenever the coefficients grow large.
pub fn wmw_exact_distribution(n_x: usize, n_y: usize) -> Result<ExactWmwDistribution> {
    wmw_exact_distribution_with_cap(n_x, n_y, DEFAULT_EXACT_CAP)
}

pub fn wmw_exact_distribution_with_cap(
    n_x: usize,
    n_y: usize,
    cap: u128,
) -> Result<ExactWmwDistribution> {
    if n_x < 1 || n_y < 1 {
        return Err(Error::InvalidSize);
    }
    let entries = (n_x as u128) * (n_y as u128);
    if entries > cap {
        return Err(Error::CapExceeded(entries, cap));
    }
    let len = n_x * n_y + 1;
    let mut c = vec![0.0f64; len];
    c[0] = 1.0;
    for i in 1..=n_y {
        // Divide by (1 − z^i): running sums with stride i.
        for m in i..len {
            c[m] += c[m - i];
        }
        // Multiply by (1 − z^{n_x + i}).
        let shift = n_x + i;
        for m in (shift..len).rev() {
            c[m] -= c[m - shift];
        }
        // Counts up to C(n_x+n_y, n_x) overflow f64 for large sizes; the
        // scaling cancels in the final normalisation. Small cases are left
        // untouched so their coefficients stay exact integers.
        let max = c.iter().cloned().fold(0.0f64, f64::max);
        if max > 1e250 {
            for v in c.iter_mut() {
                *v /= max;
            }
        }
    }
    let total: f64 = c.iter().sum();
    let mut pmf: Vec<f64> = c.into_iter().map(|v| (v / total).max(0.0)).collect();
    // The distribution is symmetric about n_x·n_y/2; enforce it exactly.
    let last = len - 1;
    for k in 0..=(last / 2) {
        let avg = 0.5 * (pmf[k] + pmf[last - k]);
        pmf[k] = avg;
        pmf[last - k] = avg;
    }
    Ok(ExactWmwDistribution { n_x, n_y, pmf })
}

/// Exact two-sided WMW p-value: min(1, 2·min(P(M ≤ u), P(M ≥ u))).
/// Tied data produce non-integer midrank statistics and are refused.
pub fn wmw_exact_pvalue(u: f64, n_x: usize, n_y: usize) -> Result<PValue> {
    wmw_exact_pvalue_with_cap(u, n_x, n_y, DEFAULT_EXACT_CAP)
}

pub fn wmw_exact_pvalue_with_cap(u: f64, n_x: usize, n_y: usize, cap: u128) -> Result<PValue> {
    if u.fract() != 0.0 {
        return Err(Error::TiesPresent);
    }
    if u < 0.0 || u > (n_x * n_y) as f64 {
        return Err(Error::DomainError(format!(
            "Mann-Whitney count {u} outside 0..={}",
            n_x * n_y
        )));
    }
    let dist = wmw_exact_distribution_with_cap(n_x, n_y, cap)?;
    let m = u as usize;
    let lower = dist.cdf(m);
    let upper = dist.survival(m);
    let p = (2.0 * lower.min(upper)).min(1.0);
    Ok(PValue {
        value: p,
        calibration: CalibrationTag::ExactWmw,
    })
}

/// C(n, k) with an early bail once the count exceeds `cap`.
fn binomial_capped(n: usize, k: usize, cap: u128) -> Result<u128> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        // Partial products are themselves binomial coefficients, so the
        // division is exact and the sequence is increasing.
        c = c * (n - k + i) as u128 / i as u128;
        if c > cap {
            return Err(Error::CapExceeded(c, cap));
        }
    }
    Ok(c)
}

/// Advances `idx` to the next lexicographic k-combination of 0..n.
/// Returns false when the last combination has been consumed.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - k {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact permutation p-value of the Welch statistic: every split of the
/// pooled values into groups of the original sizes is enumerated
/// (lexicographically over combination indices; no RNG) and
/// p = #{|T| ≥ |T_obs|}/#splits. Splits with zero variance in both groups
/// count as extreme.
pub fn welch_exact_pvalue(x: &Sample, y: &Sample, cap: u128) -> Result<PValue> {
    let observed = welch_statistic(x, y)?;
    let t_obs = observed.t_w.abs();

    let (nx, ny) = (x.len(), y.len());
    let n = nx + ny;
    let total_splits = binomial_capped(n, nx, cap)?;

    let mut pooled = Vec::with_capacity(n);
    pooled.extend_from_slice(x.values());
    pooled.extend_from_slice(y.values());
    let sum_all: f64 = pooled.iter().sum();
    let sumsq_all: f64 = pooled.iter().map(|v| v * v).sum();

    let threshold = t_obs - 1e-12 * (1.0 + t_obs);
    let mut extreme: u128 = 0;

    let mut idx: Vec<usize> = (0..nx).collect();
    loop {
        let mut sum_x = 0.0;
        let mut sumsq_x = 0.0;
        for &i in &idx {
            sum_x += pooled[i];
            sumsq_x += pooled[i] * pooled[i];
        }
        let sum_y = sum_all - sum_x;
        let sumsq_y = sumsq_all - sumsq_x;
        let (nxf, nyf) = (nx as f64, ny as f64);
        let mean_x = sum_x / nxf;
        let mean_y = sum_y / nyf;
        let var_x = (sumsq_x - nxf * mean_x * mean_x).max(0.0) / (nxf - 1.0);
        let var_y = (sumsq_y - nyf * mean_y * mean_y).max(0.0) / (nyf - 1.0);
        let se2 = var_x / nxf + var_y / nyf;
        if se2 <= 0.0 {
            // Degenerate split: treated as |T| = +inf.
            extreme += 1;
        } else {
            let t = (mean_x - mean_y) / se2.sqrt();
            if t.abs() >= threshold {
                extreme += 1;
            }
        }
        if !next_combination(&mut idx, n) {
            break;
        }
    }
    Ok(PValue {
        value: extreme as f64 / total_splits as f64,
        calibration: CalibrationTag::ExactPermutation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wmw_one_one() {
        let d = wmw_exact_distribution(1, 1).unwrap();
        assert_eq!(d.pmf, vec![0.5, 0.5]);
    }

    #[test]
    fn wmw_two_two() {
        let d = wmw_exact_distribution(2, 2).unwrap();
        let expected = [1.0 / 6.0, 1.0 / 6.0, 2.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (a, b) in d.pmf.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn wmw_symmetry_and_mass() {
        for &(nx, ny) in &[(3usize, 5usize), (4, 4), (7, 2), (10, 10)] {
            let d = wmw_exact_distribution(nx, ny).unwrap();
            let n = nx * ny;
            assert!((d.pmf.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for k in 0..=n {
                assert_eq!(d.pmf[k], d.pmf[n - k], "({nx},{ny}) at {k}");
                assert!(d.pmf[k] >= 0.0);
            }
        }
    }

    #[test]
    fn wmw_cap() {
        assert!(matches!(
            wmw_exact_distribution_with_cap(2000, 2000, 1_000_000),
            Err(Error::CapExceeded(_, _))
        ));
    }

    #[test]
    fn wmw_pvalue_cases() {
        // Center of the (2,2) distribution: capped at 1.
        assert_eq!(wmw_exact_pvalue(2.0, 2, 2).unwrap().value, 1.0);
        // Tail: 2·(1/6).
        assert!((wmw_exact_pvalue(0.0, 2, 2).unwrap().value - 1.0 / 3.0).abs() < 1e-12);
        // Symmetric arguments give identical p-values.
        for &(nx, ny) in &[(4usize, 6usize), (5, 5)] {
            for u in 0..=nx * ny {
                let a = wmw_exact_pvalue(u as f64, nx, ny).unwrap().value;
                let b = wmw_exact_pvalue((nx * ny - u) as f64, nx, ny).unwrap().value;
                assert_eq!(a, b);
            }
        }
        // Midrank (tied) statistics are refused.
        assert_eq!(wmw_exact_pvalue(2.5, 3, 3).unwrap_err(), Error::TiesPresent);
    }

    #[test]
    fn welch_exact_minimal_statistic() {
        let x = Sample::new(vec![1.0, 2.0]).unwrap();
        let y = Sample::new(vec![1.0, 2.0]).unwrap();
        let p = welch_exact_pvalue(&x, &y, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(p.value, 1.0);
    }

    #[test]
    fn welch_exact_separated() {
        let x = Sample::new(vec![1.0, 2.0, 3.0]).unwrap();
        let y = Sample::new(vec![7.0, 8.0, 9.0]).unwrap();
        let p = welch_exact_pvalue(&x, &y, DEFAULT_EXACT_CAP).unwrap();
        assert!((p.value - 0.1).abs() < 1e-15); // 2 of C(6,3)=20 splits
    }

    #[test]
    fn welch_exact_role_symmetry() {
        let x = Sample::new(vec![0.4, 1.9, 3.0, 0.1]).unwrap();
        let y = Sample::new(vec![1.0, 2.6, 2.2]).unwrap();
        let a = welch_exact_pvalue(&x, &y, DEFAULT_EXACT_CAP).unwrap().value;
        let b = welch_exact_pvalue(&y, &x, DEFAULT_EXACT_CAP).unwrap().value;
        assert_eq!(a, b);
    }

    #[test]
    fn welch_exact_cap() {
        let x = Sample::new(vec![0.0; 30]).unwrap();
        let y = Sample::new((0..30).map(|i| i as f64).collect()).unwrap();
        assert!(matches!(
            welch_exact_pvalue(&x, &y, 1000),
            Err(Error::CapExceeded(_, _))
        ));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial_capped(20, 10, u128::MAX).unwrap(), 184_756);
        assert_eq!(binomial_capped(6, 3, u128::MAX).unwrap(), 20);
    }
}
