//! Empirical likelihood ratio test for two population means.
//!
//! The statistic Λ is the maximised log-likelihood ratio of probabilities
//! p_ji assigned to the observations under the equal-means constraint. The
//! inner problem (given μ, solve the Lagrange multiplier λ per sample) is a
//! safeguarded Newton iteration; the outer problem minimises Λ(μ) over the
//! common mean with Brent's method.

use super::solve::brent_min;
use super::Sample;
use crate::{Error, Result};

const INNER_TOL: f64 = 1e-10;
const INNER_MAX_ITER: usize = 100;
const OUTER_TOL: f64 = 1e-9;
const OUTER_MAX_ITER: usize = 200;

/// EL statistic together with its solver by-products.
#[derive(Debug, Clone)]
pub struct ElResult {
    /// Likelihood-ratio statistic Λ >= 0.
    pub lambda_stat: f64,
    /// Constrained common-mean estimate (the minimiser of Λ(μ)).
    pub mu_hat: f64,
    pub lam_x: f64,
    pub lam_y: f64,
    /// Probabilities p_xi = 1/(n_x [1 + λ_x (x_i − μ̂)]).
    pub p_x: Vec<f64>,
    pub p_y: Vec<f64>,
    /// Squared one-sample t statistics of each sample about μ̂.
    pub t2_components: (f64, f64),
    pub converged: bool,
    /// Outer minimisation iterations.
    pub iterations: usize,
}

/// Solves Σᵢ (x_i − μ)/(1 + λ(x_i − μ)) = 0 for λ, keeping every
/// 1 + λ(x_i − μ) > 0. Requires min(s) < μ < max(s).
pub fn el_lambda_solve(s: &Sample, mu: f64) -> Result<(f64, usize)> {
    let (lo, hi) = (s.min(), s.max());
    if !(lo < mu && mu < hi) {
        return Err(Error::Infeasible);
    }
    let d: Vec<f64> = s.values().iter().map(|v| v - mu).collect();
    let d_max = hi - mu; // > 0
    let d_min = lo - mu; // < 0

    // Positivity of all 1 + λ d_i bounds λ to the open interval
    // (−1/d_max, −1/d_min).
    let lam_lo = -1.0 / d_max;
    let lam_hi = -1.0 / d_min;
    let shrink = 1e-12 * (lam_hi - lam_lo);
    let (mut bl, mut bh) = (lam_lo + shrink, lam_hi - shrink);

    let eval = |lam: f64| -> (f64, f64) {
        let mut f = 0.0;
        let mut df = 0.0;
        for &di in &d {
            let w = 1.0 + lam * di;
            f += di / w;
            df -= di * di / (w * w);
        }
        (f, df)
    };

    // f is strictly decreasing in λ, so the residual sign steers bisection.
    let mean_abs_d = d.iter().map(|v| v.abs()).sum::<f64>() / d.len() as f64;
    let f_tol = INNER_TOL * (1.0 + mean_abs_d);

    let mut lam = 0.0;
    for iter in 0..INNER_MAX_ITER {
        let (f, df) = eval(lam);
        if f.abs() <= f_tol {
            return Ok((lam, iter));
        }
        if f > 0.0 {
            bl = bl.max(lam);
        } else {
            bh = bh.min(lam);
        }
        let newton = lam - f / df;
        lam = if df < 0.0 && newton > bl && newton < bh {
            newton
        } else {
            0.5 * (bl + bh)
        };
        if bh - bl <= f64::EPSILON * (bh.abs() + bl.abs()) {
            let (f, _) = eval(lam);
            if f.abs() <= f_tol * 1e3 {
                return Ok((lam, iter));
            }
            break;
        }
    }
    Err(Error::NoConvergence("EL inner lambda solve".into()))
}

/// Log-likelihood ratio at a fixed μ: 2Σ log(1 + λ_x(x_i − μ)) +
/// 2Σ log(1 + λ_y(y_i − μ)), with the λs solved per sample.
fn el_lambda_at(x: &Sample, y: &Sample, mu: f64) -> Result<(f64, f64, f64)> {
    let (lx, _) = el_lambda_solve(x, mu)?;
    let (ly, _) = el_lambda_solve(y, mu)?;
    let mut acc = 0.0;
    for &v in x.values() {
        acc += (1.0 + lx * (v - mu)).ln();
    }
    for &v in y.values() {
        acc += (1.0 + ly * (v - mu)).ln();
    }
    Ok((2.0 * acc, lx, ly))
}

/// Empirical likelihood test statistic for H₀: the two population means
/// are equal.
pub fn el_statistic(x: &Sample, y: &Sample) -> Result<ElResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::InvalidSample(
            "EL needs at least 2 observations per sample".into(),
        ));
    }
    let lo = x.min().max(y.min());
    let hi = x.max().min(y.max());
    if !(lo < hi) {
        return Err(Error::NoOverlap);
    }

    let (mx, my) = (x.mean(), y.mean());
    // Bracket: between the sample means, clipped to the feasible overlap.
    let pad = 1e-10 * (hi - lo);
    let (flo, fhi) = (lo + pad, hi - pad);
    let (mut a, mut b) = (mx.min(my).max(flo), mx.max(my).min(fhi));
    if !(a < b) {
        // A sample mean can sit outside the other sample's range; fall back
        // to the full overlap (Λ → ∞ at its endpoints, so the min is interior).
        a = flo;
        b = fhi;
    }

    let objective = |mu: f64| el_lambda_at(x, y, mu).map(|(l, _, _)| l).unwrap_or(f64::INFINITY);
    let (mu_hat, _, iterations, converged) = brent_min(objective, a, b, OUTER_TOL, OUTER_MAX_ITER);
    if !converged {
        return Err(Error::NoConvergence("EL outer mean search".into()));
    }
    let (lambda_raw, lam_x, lam_y) = el_lambda_at(x, y, mu_hat)?;
    let lambda_stat = lambda_raw.max(0.0);

    let p_x: Vec<f64> = x
        .values()
        .iter()
        .map(|&v| 1.0 / (x.len() as f64 * (1.0 + lam_x * (v - mu_hat))))
        .collect();
    let p_y: Vec<f64> = y
        .values()
        .iter()
        .map(|&v| 1.0 / (y.len() as f64 * (1.0 + lam_y * (v - mu_hat))))
        .collect();

    let t2 = |s: &Sample| {
        let n = s.len() as f64;
        let dm = s.mean() - mu_hat;
        n * dm * dm / s.variance()
    };
    Ok(ElResult {
        lambda_stat,
        mu_hat,
        lam_x,
        lam_y,
        p_x,
        p_y,
        t2_components: (t2(x), t2(y)),
        converged,
        iterations,
    })
}
