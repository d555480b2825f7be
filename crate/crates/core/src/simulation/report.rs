//! Delimited and JSON serialisations of the study reports. Columns are
//! documented in the repository README; all writers are deterministic so
//! fixed-seed runs produce byte-identical files.

use super::{quantile_divergence, DivergenceReport, PowerReport, SizeReport};
use crate::calibration::MethodSpec;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// One row per (size pair, method):
/// scenario, n_x, n_y, method, calibration, replications, alpha, band_lo,
/// band_hi, rejections, valid, failures, rate, in_band.
pub fn size_report_tsv(r: &SizeReport) -> String {
    let mut out = String::new();
    out.push_str(
        "scenario\tn_x\tn_y\tmethod\tcalibration\treplications\talpha\tband_lo\tband_hi\trejections\tvalid\tfailures\trate\tin_band\n",
    );
    for c in &r.cells {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{:.6}\t{}",
            r.scenario_id,
            c.n_x,
            c.n_y,
            c.method.method,
            c.method.calibration.kind_label(),
            r.replications,
            r.alpha,
            c.band.0,
            c.band.1,
            c.rejections,
            c.valid,
            c.failures,
            c.rejection_rate,
            c.in_band
        )
        .expect("writing to string");
    }
    out
}

/// One row per (size pair, method, delta):
/// scenario, n_x, n_y, method, calibration, delta, rate, rejections,
/// valid, failures.
pub fn power_report_tsv(r: &PowerReport) -> String {
    let mut out = String::new();
    out.push_str("scenario\tn_x\tn_y\tmethod\tcalibration\tdelta\trate\trejections\tvalid\tfailures\n");
    for c in &r.cells {
        for (i, &delta) in r.deltas.iter().enumerate() {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{}\t{}\t{}",
                r.scenario_id,
                c.n_x,
                c.n_y,
                c.method.method,
                c.method.calibration.kind_label(),
                delta,
                c.rates[i],
                c.rejections[i],
                c.valid[i],
                c.failures[i]
            )
            .expect("writing to string");
        }
    }
    out
}

/// Divergence diagnostics of one size-report cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellDivergence {
    pub method: MethodSpec,
    pub n_x: usize,
    pub n_y: usize,
    pub report: DivergenceReport,
}

/// Quantile diagnostics for every cell of a size report that produced at
/// least one p-value.
pub fn divergence_for_report(r: &SizeReport, levels: &[f64]) -> Result<Vec<CellDivergence>> {
    let mut out = Vec::new();
    for c in &r.cells {
        if c.pvalues.is_empty() {
            continue;
        }
        out.push(CellDivergence {
            method: c.method,
            n_x: c.n_x,
            n_y: c.n_y,
            report: quantile_divergence(&c.pvalues, levels)?,
        });
    }
    Ok(out)
}

/// Per-level curve rows: scenario, n_x, n_y, method, calibration, level,
/// empirical_rate. Plot-ready.
pub fn divergence_curve_tsv(scenario_id: &str, cells: &[CellDivergence]) -> String {
    let mut out = String::new();
    out.push_str("scenario\tn_x\tn_y\tmethod\tcalibration\tlevel\tempirical_rate\n");
    for c in cells {
        for (l, r) in c.report.levels.iter().zip(&c.report.empirical_rates) {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.6}",
                scenario_id,
                c.n_x,
                c.n_y,
                c.method.method,
                c.method.calibration.kind_label(),
                l,
                r
            )
            .expect("writing to string");
        }
    }
    out
}

/// Summary rows: scenario, n_x, n_y, method, calibration, js_divergence,
/// max_abs_diff.
pub fn divergence_summary_tsv(scenario_id: &str, cells: &[CellDivergence]) -> String {
    let mut out = String::new();
    out.push_str("scenario\tn_x\tn_y\tmethod\tcalibration\tjs_divergence\tmax_abs_diff\n");
    for c in cells {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.8}\t{:.6}",
            scenario_id,
            c.n_x,
            c.n_y,
            c.method.method,
            c.method.calibration.kind_label(),
            c.report.js_divergence,
            c.report.max_abs_diff
        )
        .expect("writing to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::CalibrationTag;
    use crate::scenarios::make_scenario;
    use crate::simulation::{estimate_type1, SimConfig};
    use crate::testing::Method;

    #[test]
    fn tsv_shapes() {
        let cfg = SimConfig {
            scenario: make_scenario('a').unwrap(),
            size_pairs: vec![(10, 15), (20, 20)],
            methods: vec![MethodSpec::new(Method::Welch, CalibrationTag::StudentT).unwrap()],
            replications: 25,
            alpha: 0.05,
            master_seed: 5,
            b: 19,
        };
        let rep = estimate_type1(&cfg).unwrap();
        let tsv = size_report_tsv(&rep);
        assert_eq!(tsv.lines().count(), 1 + 2); // header + one row per cell
        assert!(tsv.starts_with("scenario\t"));

        let cells = divergence_for_report(&rep, &[0.25, 0.5, 0.75]).unwrap();
        assert_eq!(cells.len(), 2);
        let curve = divergence_curve_tsv(&rep.scenario_id, &cells);
        assert_eq!(curve.lines().count(), 1 + 2 * 3);
        let summary = divergence_summary_tsv(&rep.scenario_id, &cells);
        assert_eq!(summary.lines().count(), 1 + 2);
    }
}
