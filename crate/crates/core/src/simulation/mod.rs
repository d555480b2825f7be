//! Monte Carlo harness: type I error tables with size-band verdicts,
//! power curves over location shifts, and p-value uniformity diagnostics.
//!
//! Replications are independent tasks on RNG substreams derived from
//! (master seed, scenario id, size-pair index, replication index), so a
//! run is bit-identical for any worker count, and all methods within one
//! replication see the same drawn samples.

mod divergence;
pub mod report;

pub use divergence::{default_levels, quantile_divergence, DivergenceReport};

use crate::calibration::{apply_method, MethodSpec, DEFAULT_EXACT_CAP};
use crate::rng::{derive_stream, PATH_BOOTSTRAP, PATH_SAMPLE_X, PATH_SAMPLE_Y};
use crate::scenarios::{sample, shift, ScenarioSpec};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Configuration of one simulation study.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub scenario: ScenarioSpec,
    pub size_pairs: Vec<(usize, usize)>,
    pub methods: Vec<MethodSpec>,
    pub replications: usize,
    pub alpha: f64,
    pub master_seed: u64,
    /// Bootstrap resamples for bootstrap-calibrated methods.
    pub b: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 1 {
            return Err(Error::Validation("replications must be >= 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Validation(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.size_pairs.is_empty() {
            return Err(Error::Validation("at least one size pair is required".into()));
        }
        for &(nx, ny) in &self.size_pairs {
            if nx < 1 || ny < 1 {
                return Err(Error::Validation("sample sizes must be positive".into()));
            }
        }
        if self.methods.is_empty() {
            return Err(Error::Validation("at least one method is required".into()));
        }
        for m in &self.methods {
            m.calibration.validate(m.method)?;
        }
        self.scenario.sample1.validate()?;
        self.scenario.sample2.validate()?;
        Ok(())
    }
}

/// 95% binomial band around the nominal level:
/// alpha ± 1.96 √(alpha(1 − alpha)/replications).
pub fn size_band(alpha: f64, replications: usize) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::DomainError(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if replications < 1 {
        return Err(Error::DomainError("replications must be >= 1".into()));
    }
    let half = 1.96 * (alpha * (1.0 - alpha) / replications as f64).sqrt();
    Ok((alpha - half, alpha + half))
}

/// Result of one (method, size pair) cell of a type I error study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeCell {
    pub method: MethodSpec,
    pub n_x: usize,
    pub n_y: usize,
    pub rejections: usize,
    /// Replications on which the method produced a p-value.
    pub valid: usize,
    /// Solver failures, excluded from the rejection denominator.
    pub failures: usize,
    pub rejection_rate: f64,
    pub band: (f64, f64),
    pub in_band: bool,
    /// P-values of the successful replications, in replication order.
    pub pvalues: Vec<f64>,
}

/// Type I error study output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SizeReport {
    pub scenario_id: String,
    pub replications: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub b: usize,
    pub cells: Vec<SizeCell>,
}

/// Power study output: rejection rates per (size pair, method) across a
/// delta grid applied to sample 2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerReport {
    pub scenario_id: String,
    pub replications: usize,
    pub alpha: f64,
    pub master_seed: u64,
    pub b: usize,
    pub deltas: Vec<f64>,
    pub cells: Vec<PowerCell>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerCell {
    pub method: MethodSpec,
    pub n_x: usize,
    pub n_y: usize,
    /// Rejection rate at each delta (failures excluded from denominators).
    pub rates: Vec<f64>,
    pub rejections: Vec<usize>,
    pub valid: Vec<usize>,
    pub failures: Vec<usize>,
}

/// P-values of one replication: one entry per method, `Err` holding the
/// stable failure name.
type RepRow = Vec<std::result::Result<f64, String>>;

fn run_replications(
    scenario_code: u64,
    master_seed: u64,
    sample1: &crate::scenarios::DistSpec,
    sample2: &crate::scenarios::DistSpec,
    pair_idx: usize,
    n_x: usize,
    n_y: usize,
    methods: &[MethodSpec],
    replications: usize,
) -> Vec<RepRow> {
    let run_one = |rep: usize| -> RepRow {
        let mut rx = derive_stream(
            master_seed,
            &[scenario_code, pair_idx as u64, rep as u64, PATH_SAMPLE_X],
        );
        let mut ry = derive_stream(
            master_seed,
            &[scenario_code, pair_idx as u64, rep as u64, PATH_SAMPLE_Y],
        );
        let x = sample(sample1, n_x, &mut rx).expect("validated config");
        let y = sample(sample2, n_y, &mut ry).expect("validated config");
        methods
            .iter()
            .map(|m| {
                let mut brng = derive_stream(
                    master_seed,
                    &[
                        scenario_code,
                        pair_idx as u64,
                        rep as u64,
                        PATH_BOOTSTRAP,
                        m.code(),
                    ],
                );
                apply_method(m, &x, &y, &mut brng, DEFAULT_EXACT_CAP)
                    .map(|o| o.p.value)
                    .map_err(|e| e.name().to_string())
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    {
        (0..replications).into_par_iter().map(run_one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..replications).map(run_one).collect()
    }
}

/// Estimates the type I error of every configured (method, calibration)
/// on every size pair. Requires a null scenario (equal means).
pub fn estimate_type1(cfg: &SimConfig) -> Result<SizeReport> {
    cfg.validate()?;
    let band = size_band(cfg.alpha, cfg.replications)?;
    let scenario_code = cfg.scenario.id as u64;
    let mut cells = Vec::new();

    for (pair_idx, &(n_x, n_y)) in cfg.size_pairs.iter().enumerate() {
        let rows = run_replications(
            scenario_code,
            cfg.master_seed,
            &cfg.scenario.sample1,
            &cfg.scenario.sample2,
            pair_idx,
            n_x,
            n_y,
            &cfg.methods,
            cfg.replications,
        );
        for (mi, method) in cfg.methods.iter().enumerate() {
            let mut rejections = 0;
            let mut failures = 0;
            let mut pvalues = Vec::new();
            for row in &rows {
                match &row[mi] {
                    Ok(p) => {
                        if *p <= cfg.alpha {
                            rejections += 1;
                        }
                        pvalues.push(*p);
                    }
                    Err(_) => failures += 1,
                }
            }
            let valid = pvalues.len();
            let rate = if valid > 0 {
                rejections as f64 / valid as f64
            } else {
                f64::NAN
            };
            cells.push(SizeCell {
                method: *method,
                n_x,
                n_y,
                rejections,
                valid,
                failures,
                rejection_rate: rate,
                band,
                in_band: rate > band.0 && rate < band.1,
                pvalues,
            });
        }
    }
    Ok(SizeReport {
        scenario_id: cfg.scenario.id.to_string(),
        replications: cfg.replications,
        alpha: cfg.alpha,
        master_seed: cfg.master_seed,
        b: cfg.b,
        cells,
    })
}

/// Estimates power over a grid of location shifts applied to sample 2.
/// The RNG paths do not involve the delta, so delta = 0 reproduces the
/// type I estimates exactly and the curves share common random numbers.
pub fn estimate_power(cfg: &SimConfig, deltas: &[f64]) -> Result<PowerReport> {
    cfg.validate()?;
    if deltas.is_empty() {
        return Err(Error::Validation("at least one delta is required".into()));
    }
    if let Some(d) = deltas.iter().find(|d| !d.is_finite()) {
        return Err(Error::Validation(format!("non-finite delta {d}")));
    }
    let scenario_code = cfg.scenario.id as u64;
    let mut cells: Vec<PowerCell> = cfg
        .size_pairs
        .iter()
        .flat_map(|&(n_x, n_y)| {
            cfg.methods.iter().map(move |m| PowerCell {
                method: *m,
                n_x,
                n_y,
                rates: Vec::new(),
                rejections: Vec::new(),
                valid: Vec::new(),
                failures: Vec::new(),
            })
        })
        .collect();

    for (di, &delta) in deltas.iter().enumerate() {
        let _ = di;
        let shifted = shift(&cfg.scenario.sample2, delta);
        for (pair_idx, &(n_x, n_y)) in cfg.size_pairs.iter().enumerate() {
            let rows = run_replications(
                scenario_code,
                cfg.master_seed,
                &cfg.scenario.sample1,
                &shifted,
                pair_idx,
                n_x,
                n_y,
                &cfg.methods,
                cfg.replications,
            );
            for (mi, _) in cfg.methods.iter().enumerate() {
                let mut rejections = 0;
                let mut failures = 0;
                let mut valid = 0;
                for row in &rows {
                    match &row[mi] {
                        Ok(p) => {
                            valid += 1;
                            if *p <= cfg.alpha {
                                rejections += 1;
                            }
                        }
                        Err(_) => failures += 1,
                    }
                }
                let cell = &mut cells[pair_idx * cfg.methods.len() + mi];
                cell.rejections.push(rejections);
                cell.valid.push(valid);
                cell.failures.push(failures);
                cell.rates.push(if valid > 0 {
                    rejections as f64 / valid as f64
                } else {
                    f64::NAN
                });
            }
        }
    }
    Ok(PowerReport {
        scenario_id: cfg.scenario.id.to_string(),
        replications: cfg.replications,
        alpha: cfg.alpha,
        master_seed: cfg.master_seed,
        b: cfg.b,
        deltas: deltas.to_vec(),
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::CalibrationTag;
    use crate::scenarios::make_scenario;
    use crate::testing::Method;

    fn quick_cfg() -> SimConfig {
        SimConfig {
            scenario: make_scenario('a').unwrap(),
            size_pairs: vec![(12, 17)],
            methods: vec![
                MethodSpec::new(Method::Welch, CalibrationTag::StudentT).unwrap(),
                MethodSpec::new(Method::Wmw, CalibrationTag::StdNormal).unwrap(),
            ],
            replications: 60,
            alpha: 0.05,
            master_seed: 42,
            b: 19,
        }
    }

    #[test]
    fn band_values() {
        let (lo, hi) = size_band(0.05, 1000).unwrap();
        assert!((lo - 0.0365).abs() < 5e-5, "lo={lo}");
        assert!((hi - 0.0635).abs() < 5e-5, "hi={hi}");

        // Half-width halves when replications quadruple.
        let (lo4, hi4) = size_band(0.05, 4000).unwrap();
        assert!(((hi4 - lo4) - (hi - lo) / 2.0).abs() < 1e-12);

        let (lo5, hi5) = size_band(0.5, 100).unwrap();
        assert!((lo5 - 0.402).abs() < 1e-3);
        assert!((hi5 - 0.598).abs() < 1e-3);

        assert!(size_band(0.0, 100).is_err());
        assert!(size_band(0.05, 0).is_err());
    }

    #[test]
    fn type1_reproducible_and_exact_tallies() {
        let cfg = quick_cfg();
        let a = estimate_type1(&cfg).unwrap();
        let b = estimate_type1(&cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        for cell in &a.cells {
            assert_eq!(cell.valid + cell.failures, cfg.replications);
            let n = cell.rejection_rate * cell.valid as f64;
            assert!((n - n.round()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_replications_rejected() {
        let mut cfg = quick_cfg();
        cfg.replications = 0;
        assert!(matches!(estimate_type1(&cfg), Err(Error::Validation(_))));
    }

    #[test]
    fn power_at_zero_delta_matches_type1() {
        let cfg = quick_cfg();
        let t1 = estimate_type1(&cfg).unwrap();
        let power = estimate_power(&cfg, &[0.0, 1.0]).unwrap();
        for (cell, t1_cell) in power.cells.iter().zip(&t1.cells) {
            assert_eq!(cell.rates[0], t1_cell.rejection_rate);
            assert_eq!(cell.rejections[0], t1_cell.rejections);
            // A unit shift on scenario (a) must raise rejections.
            assert!(cell.rates[1] > cell.rates[0]);
        }
    }
}
