//! Welch t-statistic with Welch-Satterthwaite degrees of freedom, and the
//! variance-weighted common mean used by the bootstrap null transform.

use super::Sample;
use crate::{Error, Result};

/// Welch statistic and its effective degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchResult {
    pub t_w: f64,
    pub nu: f64,
    pub mean_diff: f64,
    pub se: f64,
}

/// Computes T_w = (x̄ − ȳ)/√(s_x²/n_x + s_y²/n_y) with unbiased variances,
/// and the Welch-Satterthwaite ν.
pub fn welch_statistic(x: &Sample, y: &Sample) -> Result<WelchResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InvalidSample(
            "Welch statistic needs at least 2 observations per sample".into(),
        ));
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let (vx, vy) = (x.variance(), y.variance());
    if vx + vy <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let (ax, ay) = (vx / nx, vy / ny);
    let se = (ax + ay).sqrt();
    let mean_diff = x.mean() - y.mean();
    let t_w = mean_diff / se;
    let nu = (ax + ay) * (ax + ay) / (ax * ax / (nx - 1.0) + ay * ay / (ny - 1.0));
    Ok(WelchResult {
        t_w,
        nu,
        mean_diff,
        se,
    })
}

/// Variance-weighted estimate of the common mean under the null:
/// μ̂_c = (n_x/s_x² + n_y/s_y²)⁻¹ (n_x x̄/s_x² + n_y ȳ/s_y²).
pub fn common_mean(x: &Sample, y: &Sample) -> Result<f64> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InvalidSample(
            "common mean needs at least 2 observations per sample".into(),
        ));
    }
    let (vx, vy) = (x.variance(), y.variance());
    if vx <= 0.0 || vy <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let (wx, wy) = (x.len() as f64 / vx, y.len() as f64 / vy);
    Ok((wx * x.mean() + wy * y.mean()) / (wx + wy))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_samples_give_zero() {
        let x = s(&[1.0, 2.0, 5.0, 9.0]);
        let r = welch_statistic(&x, &x).unwrap();
        assert_eq!(r.t_w, 0.0);
        assert_eq!(r.mean_diff, 0.0);
    }

    #[test]
    fn equal_sizes_equal_variances_df() {
        // nu reduces to 2(n-1) when n_x = n_y and s_x² = s_y².
        let x = s(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = s(&[11.0, 12.0, 13.0, 14.0, 15.0]);
        let r = welch_statistic(&x, &y).unwrap();
        assert!((r.nu - 8.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_example() {
        // x = {1,2,3}, y = {2,4,6}: t_w = -2/sqrt(5/3), nu = 50/17.
        let r = welch_statistic(&s(&[1.0, 2.0, 3.0]), &s(&[2.0, 4.0, 6.0])).unwrap();
        assert!((r.t_w - (-2.0 / (5.0f64 / 3.0).sqrt())).abs() < 1e-12);
        assert!((r.nu - 50.0 / 17.0).abs() < 1e-12);
        assert!((r.t_w - r.mean_diff / r.se).abs() < 1e-15);
    }

    #[test]
    fn nu_bounds() {
        let x = s(&[0.3, 1.9, 2.2, 4.0, 5.5]);
        let y = s(&[1.0, 1.1, 9.7]);
        let r = welch_statistic(&x, &y).unwrap();
        let (nx, ny) = (5.0, 3.0);
        assert!(r.nu <= nx + ny - 2.0 + 1e-12);
        assert!(r.nu >= nx.min(ny) - 1.0 - 1e-12);
    }

    #[test]
    fn zero_variance_rejected() {
        let x = s(&[2.0, 2.0, 2.0]);
        assert_eq!(welch_statistic(&x, &x), Err(Error::ZeroVariance));
    }

    #[test]
    fn common_mean_cases() {
        // Equal sizes and variances: plain average of the means.
        let x = s(&[1.0, 2.0, 3.0]);
        let y = s(&[4.0, 5.0, 6.0]);
        assert!((common_mean(&x, &y).unwrap() - 3.5).abs() < 1e-12);

        // Equal means: the common mean is that mean.
        let x = s(&[0.0, 4.0]);
        let y = s(&[1.0, 2.0, 3.0]);
        assert!((common_mean(&x, &y).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn common_mean_weighted_example() {
        // n_x=10, s_x²=1, x̄=0; n_y=40, s_y²=4, ȳ=1 → 0.5.
        // Construct samples with exactly those moments.
        let mut xv = vec![0.0; 10];
        // variance 1 with mean 0: symmetric pair scaled to match
        let delta = (9.0f64 / 10.0).sqrt(); // so that sum sq = 9 → var = 1
        for (i, v) in xv.iter_mut().enumerate().take(10) {
            *v = if i % 2 == 0 { delta } else { -delta };
        }
        let x = Sample::new(xv).unwrap();
        assert!((x.mean()).abs() < 1e-12);
        assert!((x.variance() - 1.0).abs() < 1e-12);

        let mut yv = vec![1.0; 40];
        let d2 = (4.0f64 * 39.0 / 40.0).sqrt();
        for (i, v) in yv.iter_mut().enumerate().take(40) {
            *v = if i % 2 == 0 { 1.0 + d2 } else { 1.0 - d2 };
        }
        let y = Sample::new(yv).unwrap();
        assert!((y.mean() - 1.0).abs() < 1e-12);
        assert!((y.variance() - 4.0).abs() < 1e-12);

        assert!((common_mean(&x, &y).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn common_mean_zero_variance() {
        let x = s(&[2.0, 2.0]);
        let y = s(&[1.0, 3.0]);
        assert_eq!(common_mean(&x, &y), Err(Error::ZeroVariance));
    }
}
