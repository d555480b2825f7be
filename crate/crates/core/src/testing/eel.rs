//! Exponential empirical likelihood (exponential tilting) test.
//!
//! The probabilities take the softmax form p_ji ∝ exp(λ_j x_ji). The
//! multiplier identity n_x λ_x + n_y λ_y = 0 eliminates the common mean,
//! leaving a single monotone equation in λ_x: the tilted mean of x under
//! λ_x must equal the tilted mean of y under −(n_x/n_y) λ_x. Exponents are
//! stabilised by subtracting their maximum before exponentiation.

use super::solve::brent_root;
use super::Sample;
use crate::{Error, Result};

const ROOT_TOL_FACTOR: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 200;
const MAX_ROOT_ITER: usize = 200;
/// Exponent spread beyond which the tilted weights are numerically a point
/// mass and the equation is unsolvable in f64.
const MAX_EXPONENT_SPREAD: f64 = 700.0;

/// EEL statistic and solver by-products.
#[derive(Debug, Clone)]
pub struct EelResult {
    /// Likelihood-ratio statistic Λ >= 0.
    pub lambda_stat: f64,
    /// The single tilt λ = λ_x.
    pub lam: f64,
    pub lam_x: f64,
    /// λ_y = −(n_x λ_x)/n_y, defined by the multiplier identity.
    pub lam_y: f64,
    /// Common tilted mean attained by both samples.
    pub tilted_mean: f64,
    pub p_x: Vec<f64>,
    pub p_y: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Tilted mean Σ v e^{t v}/Σ e^{t v}, max-stabilised. Also returns the
/// exponent spread actually used.
fn tilted_mean(values: &[f64], t: f64) -> (f64, f64) {
    let m = values
        .iter()
        .map(|&v| t * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut wsum = 0.0;
    let mut vsum = 0.0;
    let mut min_e = f64::INFINITY;
    for &v in values {
        let e = t * v - m;
        min_e = min_e.min(e);
        let w = e.exp();
        wsum += w;
        vsum += w * v;
    }
    (vsum / wsum, -min_e)
}

fn softmax(values: &[f64], t: f64) -> Vec<f64> {
    let m = values
        .iter()
        .map(|&v| t * v)
        .fold(f64::NEG_INFINITY, f64::max);
    let ws: Vec<f64> = values.iter().map(|&v| (t * v - m).exp()).collect();
    let sum: f64 = ws.iter().sum();
    ws.into_iter().map(|w| w / sum).collect()
}

/// Exponential empirical likelihood statistic for H₀: equal means.
pub fn eel_statistic(x: &Sample, y: &Sample) -> Result<EelResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InvalidSample(
            "EEL needs at least 2 observations per sample".into(),
        ));
    }
    let lo = x.min().max(y.min());
    let hi = x.max().min(y.max());
    if !(lo < hi) {
        return Err(Error::NoOverlap);
    }

    let ratio = x.len() as f64 / y.len() as f64;
    let residual = |lam: f64| {
        let (mx, _) = tilted_mean(x.values(), lam);
        let (my, _) = tilted_mean(y.values(), -ratio * lam);
        mx - my
    };

    let scale = (x.mean().abs() + y.mean().abs()).max(1.0);
    let f_tol = ROOT_TOL_FACTOR * scale;
    let r0 = residual(0.0);

    let (lam, iterations) = if r0 == 0.0 {
        (0.0, 0)
    } else {
        // The residual is strictly increasing in λ; march a bracket out in
        // the root's direction, doubling the step.
        let spread = (x.max() - x.min()).max(y.max() - y.min());
        let mut step = if r0 > 0.0 { -1.0 } else { 1.0 } / spread;
        let mut a = 0.0;
        let mut fa = r0;
        let mut b;
        let mut fb;
        let mut n_doubles = 0;
        loop {
            b = step;
            fb = residual(b);
            if fa.signum() != fb.signum() || fb == 0.0 {
                break;
            }
            a = b;
            fa = fb;
            step *= 2.0;
            n_doubles += 1;
            if n_doubles > MAX_DOUBLINGS
                || (b * spread).abs() > MAX_EXPONENT_SPREAD * 1e3
            {
                return Err(Error::NumericOverflow);
            }
        }
        let (a, b, fa, fb) = if a < b { (a, b, fa, fb) } else { (b, a, fb, fa) };
        match brent_root(residual, a, b, fa, fb, f_tol, MAX_ROOT_ITER) {
            Some((r, it)) => (r, it),
            None => return Err(Error::NoConvergence("EEL tilt equation".into())),
        }
    };

    // Reject solutions resting on numerically degenerate weights.
    let (tx, spread_x) = tilted_mean(x.values(), lam);
    let (ty, spread_y) = tilted_mean(y.values(), -ratio * lam);
    if spread_x > MAX_EXPONENT_SPREAD || spread_y > MAX_EXPONENT_SPREAD {
        return Err(Error::NumericOverflow);
    }
    if (tx - ty).abs() > 1e-8 * scale {
        return Err(Error::NoConvergence("EEL tilted means did not meet".into()));
    }

    let lam_x = lam;
    let lam_y = -(x.len() as f64 * lam) / y.len() as f64;
    let p_x = softmax(x.values(), lam_x);
    let p_y = softmax(y.values(), lam_y);

    // Λ = −2 Σ log(n_j p_ji), evaluated in log space.
    let log_part = |values: &[f64], t: f64| -> f64 {
        let n = values.len() as f64;
        let m = values.iter().map(|&v| t * v).fold(f64::NEG_INFINITY, f64::max);
        let lse = values
            .iter()
            .map(|&v| (t * v - m).exp())
            .sum::<f64>()
            .ln()
            + m;
        let s: f64 = values.iter().sum();
        n * n.ln() + t * s - n * lse
    };
    let lambda_stat =
        (-2.0 * (log_part(x.values(), lam_x) + log_part(y.values(), lam_y))).max(0.0);

    Ok(EelResult {
        lambda_stat,
        lam,
        lam_x,
        lam_y,
        tilted_mean: 0.5 * (tx + ty),
        p_x,
        p_y,
        converged: true,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn equal_means_zero_tilt() {
        let x = s(&[1.0, 2.0, 3.0]);
        let y = s(&[0.0, 2.0, 4.0]);
        let r = eel_statistic(&x, &y).unwrap();
        assert_eq!(r.lam, 0.0);
        assert_eq!(r.lambda_stat, 0.0);
        assert!((r.tilted_mean - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multiplier_identity() {
        let x = s(&[0.4, 1.1, 2.8, 3.0, 4.6]);
        let y = s(&[1.5, 2.5, 3.5, 0.7, 2.2, 4.0, 1.9]);
        let r = eel_statistic(&x, &y).unwrap();
        // λ_y is defined by the identity, so the relation is exact by
        // construction and the sum vanishes to rounding.
        assert_eq!(r.lam_y, -(x.len() as f64 * r.lam_x) / y.len() as f64);
        let sum = x.len() as f64 * r.lam_x + y.len() as f64 * r.lam_y;
        assert!(sum.abs() <= 4.0 * f64::EPSILON * (x.len() as f64 * r.lam_x).abs());
    }

    #[test]
    fn tilted_means_agree() {
        let x = s(&[0.0, 1.0, 2.0, 3.5, 5.0]);
        let y = s(&[2.1, 3.3, 4.8, 1.7]);
        let r = eel_statistic(&x, &y).unwrap();
        let (tx, _) = tilted_mean(x.values(), r.lam_x);
        let (ty, _) = tilted_mean(y.values(), r.lam_y);
        assert!((tx - ty).abs() < 1e-8);
        assert!((r.tilted_mean - tx).abs() < 1e-8);
        assert!(r.lambda_stat > 0.0);
    }

    #[test]
    fn probabilities_are_softmax_and_sum_to_one() {
        let x = s(&[0.2, 0.8, 1.9, 2.4]);
        let y = s(&[1.0, 1.5, 2.0, 2.5, 3.0]);
        let r = eel_statistic(&x, &y).unwrap();
        assert!((r.p_x.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((r.p_y.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(r.p_x.iter().all(|&p| p > 0.0));
        // Tilted mean reproduced by the probabilities.
        let tm: f64 = r.p_x.iter().zip(x.values()).map(|(&p, &v)| p * v).sum();
        assert!((tm - r.tilted_mean).abs() < 1e-8);
    }

    #[test]
    fn no_overlap_rejected() {
        let x = s(&[0.0, 1.0]);
        let y = s(&[5.0, 6.0]);
        assert_eq!(eel_statistic(&x, &y).unwrap_err(), Error::NoOverlap);
    }

    #[test]
    fn statistic_nonnegative_and_zero_iff_equal_means() {
        let x = s(&[1.0, 3.0]);
        let y = s(&[0.5, 3.5]);
        let r = eel_statistic(&x, &y).unwrap();
        assert!(r.lambda_stat.abs() < 1e-12); // means both 2.0

        let y2 = s(&[0.5, 3.6]);
        let r2 = eel_statistic(&x, &y2).unwrap();
        assert!(r2.lambda_stat > 1e-6);
    }
}
