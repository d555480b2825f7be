//! Row-wise batch testing of an expression-style matrix between two
//! groups, with a timing harness.
//!
//! Rows are independent; each gets its own bootstrap substream keyed by
//! row index, so results do not depend on worker count or processing
//! order. Per-row solver failures are recorded in the outcome and never
//! abort a run.

use crate::calibration::{apply_method, CalibrationTag, MethodSpec, DEFAULT_EXACT_CAP};
use crate::rng::{derive_stream, PATH_BOOTSTRAP};
use crate::scenarios::{sample, DistSpec};
use crate::testing::{Method, Sample, TestOutcome};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// A features × observations matrix with a two-group column labelling.
#[derive(Debug, Clone)]
pub struct ExpressionMatrix {
    feature_ids: Vec<String>,
    /// Row-major values, rows × cols.
    values: Vec<f64>,
    cols: usize,
    /// Per column: true for the first group (x side of every test).
    group_labels: Vec<bool>,
    group_names: (String, String),
}

impl ExpressionMatrix {
    pub fn rows(&self) -> usize {
        self.feature_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn group_names(&self) -> (&str, &str) {
        (&self.group_names.0, &self.group_names.1)
    }

    pub fn group_sizes(&self) -> (usize, usize) {
        let n1 = self.group_labels.iter().filter(|&&g| g).count();
        (n1, self.cols - n1)
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    /// Splits row `r` into (group 1, group 2) value vectors.
    pub fn split_row(&self, r: usize) -> (Vec<f64>, Vec<f64>) {
        let row = self.row(r);
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (v, &g) in row.iter().zip(&self.group_labels) {
            if g {
                a.push(*v);
            } else {
                b.push(*v);
            }
        }
        (a, b)
    }

    /// First `k` rows as a new matrix (used by the timing warm-up).
    pub fn head(&self, k: usize) -> ExpressionMatrix {
        let k = k.min(self.rows());
        ExpressionMatrix {
            feature_ids: self.feature_ids[..k].to_vec(),
            values: self.values[..k * self.cols].to_vec(),
            cols: self.cols,
            group_labels: self.group_labels.clone(),
            group_names: self.group_names.clone(),
        }
    }

    fn validate(self) -> Result<Self> {
        let (n1, n2) = self.group_sizes();
        if n1 < 2 || n2 < 2 {
            return Err(Error::GroupError(format!(
                "both groups need >= 2 members (got {n1} and {n2})"
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for id in &self.feature_ids {
            if !seen.insert(id) {
                return Err(Error::Validation(format!("duplicate feature id `{id}`")));
            }
        }
        Ok(self)
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Loads a delimited wide matrix (rows = features, columns = observations;
/// first line holds column ids) plus a sidecar label file mapping each
/// column id to one of exactly two group names.
pub fn load_matrix(matrix_path: &Path, labels_path: &Path) -> Result<ExpressionMatrix> {
    let text = read_file(matrix_path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::ParseError {
            line: 1,
            column: 1,
            message: "empty matrix file".into(),
        })?;
    let header_fields = split_fields(header);
    if header_fields.len() < 2 {
        return Err(Error::ParseError {
            line: 1,
            column: 1,
            message: "header must list at least one column id".into(),
        });
    }
    // First header field is a corner label for the feature-id column.
    let column_ids: Vec<String> = header_fields[1..].iter().map(|s| s.to_string()).collect();
    let cols = column_ids.len();

    let mut feature_ids = Vec::new();
    let mut values = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields = split_fields(line);
        if fields.len() != cols + 1 {
            return Err(Error::ParseError {
                line: line_no,
                column: fields.len(),
                message: format!("expected {} fields, found {}", cols + 1, fields.len()),
            });
        }
        feature_ids.push(fields[0].to_string());
        for (j, f) in fields[1..].iter().enumerate() {
            let v: f64 = f.parse().map_err(|_| Error::ParseError {
                line: line_no,
                column: j + 2,
                message: format!("expected a number, found `{f}`"),
            })?;
            if !v.is_finite() {
                return Err(Error::ParseError {
                    line: line_no,
                    column: j + 2,
                    message: format!("non-finite value {v}"),
                });
            }
            values.push(v);
        }
    }
    if feature_ids.is_empty() {
        return Err(Error::ParseError {
            line: 2,
            column: 1,
            message: "matrix has no data rows".into(),
        });
    }

    // Sidecar labels: `column_id<TAB>group`, two distinct groups.
    let label_text = read_file(labels_path)?;
    let mut label_map = std::collections::HashMap::new();
    let mut group_names: Vec<String> = Vec::new();
    for (i, line) in label_text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields = split_fields(line);
        if fields.len() != 2 {
            return Err(Error::ParseError {
                line: line_no,
                column: fields.len(),
                message: format!("expected `column_id<TAB>group`, found {} fields", fields.len()),
            });
        }
        if !group_names.iter().any(|g| g == fields[1]) {
            group_names.push(fields[1].to_string());
        }
        label_map.insert(fields[0].to_string(), fields[1].to_string());
    }
    if group_names.len() != 2 {
        return Err(Error::GroupError(format!(
            "label file must define exactly two groups, found {}",
            group_names.len()
        )));
    }
    let mut group_labels = Vec::with_capacity(cols);
    for id in &column_ids {
        match label_map.get(id) {
            Some(g) => group_labels.push(*g == group_names[0]),
            None => {
                return Err(Error::GroupError(format!(
                    "column `{id}` has no label entry"
                )))
            }
        }
    }

    ExpressionMatrix {
        feature_ids,
        values,
        cols,
        group_labels,
        group_names: (group_names[0].clone(), group_names[1].clone()),
    }
    .validate()
}

/// Synthetic null matrix: every entry N(0, 1), one substream per row.
pub fn synthetic_null_matrix(rows: usize, n_x: usize, n_y: usize, seed: u64) -> Result<ExpressionMatrix> {
    if rows < 1 {
        return Err(Error::Validation("matrix needs at least one row".into()));
    }
    if n_x < 2 || n_y < 2 {
        return Err(Error::GroupError(
            "both groups need >= 2 members".into(),
        ));
    }
    let cols = n_x + n_y;
    let std_normal = DistSpec::normal(0.0, 1.0).expect("valid");
    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let mut rng = derive_stream(seed, &[r as u64]);
        let s = sample(&std_normal, cols, &mut rng).expect("validated sizes");
        values.extend_from_slice(s.values());
    }
    let mut group_labels = vec![true; n_x];
    group_labels.extend(vec![false; n_y]);
    ExpressionMatrix {
        feature_ids: (0..rows).map(|r| format!("feature_{r:06}")).collect(),
        values,
        cols,
        group_labels,
        group_names: ("g1".into(), "g2".into()),
    }
    .validate()
}

fn row_outcome(m: &ExpressionMatrix, r: usize, spec: &MethodSpec, seed: u64) -> TestOutcome {
    let (a, b) = m.split_row(r);
    let x = Sample::new(a).expect("loader validated values");
    let y = Sample::new(b).expect("loader validated values");
    let mut brng = derive_stream(seed, &[r as u64, PATH_BOOTSTRAP, spec.code()]);
    match apply_method(spec, &x, &y, &mut brng, DEFAULT_EXACT_CAP) {
        Ok(o) => TestOutcome {
            method: spec.method,
            calibration: spec.calibration.kind_label().to_string(),
            statistic: Some(o.statistic),
            df: o.df,
            p_value: Some(o.p.value),
            failure: None,
            converged: true,
        },
        // A constant row with equal group means carries no evidence of a
        // difference; report t = 0, p = 1 instead of a failure.
        Err(Error::ZeroVariance)
            if spec.method == Method::Welch && x.mean() == y.mean() =>
        {
            TestOutcome {
                method: spec.method,
                calibration: spec.calibration.kind_label().to_string(),
                statistic: Some(0.0),
                df: None,
                p_value: Some(1.0),
                failure: None,
                converged: true,
            }
        }
        Err(e) => TestOutcome {
            method: spec.method,
            calibration: spec.calibration.kind_label().to_string(),
            statistic: None,
            df: None,
            p_value: None,
            failure: Some(e.name().to_string()),
            converged: false,
        },
    }
}

/// Tests every row of the matrix with one (method, calibration).
/// WMW is not part of the batch surface; use Welch, EL or EEL.
pub fn batch_test(
    m: &ExpressionMatrix,
    method: Method,
    cal: CalibrationTag,
    seed: u64,
) -> Result<Vec<TestOutcome>> {
    if method == Method::Wmw {
        return Err(Error::Validation(
            "batch testing supports welch, el and eel".into(),
        ));
    }
    let spec = MethodSpec::new(method, cal)?;
    let run = |r: usize| row_outcome(m, r, &spec, seed);

    #[cfg(feature = "parallel")]
    let outcomes: Vec<TestOutcome> = (0..m.rows()).into_par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<TestOutcome> = (0..m.rows()).map(run).collect();

    Ok(outcomes)
}

/// Wall-clock timing of one (method, calibration) over all rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingEntry {
    pub method: Method,
    pub calibration: String,
    pub seconds_serial: f64,
    pub seconds_parallel: f64,
    pub parallel_workers: usize,
    pub tests: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct TimingReport {
    pub rows: usize,
    pub n_x: usize,
    pub n_y: usize,
    pub entries: Vec<TimingEntry>,
}

/// Times each (method, calibration) over the whole matrix, single-threaded
/// and with the full worker pool. A warm-up pass over the leading rows is
/// excluded from the clock.
pub fn time_methods(
    m: &ExpressionMatrix,
    specs: &[MethodSpec],
    seed: u64,
) -> Result<TimingReport> {
    let (n_x, n_y) = m.group_sizes();
    let mut report = TimingReport {
        rows: m.rows(),
        n_x,
        n_y,
        entries: Vec::new(),
    };
    let warmup = m.head(256.min(m.rows()));
    for spec in specs {
        let _ = batch_test(&warmup, spec.method, spec.calibration, seed)?;

        let serial_start = Instant::now();
        let outcomes = run_serial(m, spec, seed)?;
        let seconds_serial = serial_start.elapsed().as_secs_f64();

        let parallel_start = Instant::now();
        let _ = batch_test(m, spec.method, spec.calibration, seed)?;
        let seconds_parallel = parallel_start.elapsed().as_secs_f64();

        let failures = outcomes.iter().filter(|o| o.failure.is_some()).count();
        report.entries.push(TimingEntry {
            method: spec.method,
            calibration: spec.calibration.kind_label().to_string(),
            seconds_serial,
            seconds_parallel,
            parallel_workers: current_workers(),
            tests: outcomes.len(),
            failures,
        });
    }
    Ok(report)
}

#[cfg(feature = "parallel")]
fn run_serial(m: &ExpressionMatrix, spec: &MethodSpec, seed: u64) -> Result<Vec<TestOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
    pool.install(|| batch_test(m, spec.method, spec.calibration, seed))
}

#[cfg(not(feature = "parallel"))]
fn run_serial(m: &ExpressionMatrix, spec: &MethodSpec, seed: u64) -> Result<Vec<TestOutcome>> {
    batch_test(m, spec.method, spec.calibration, seed)
}

#[cfg(feature = "parallel")]
fn current_workers() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
fn current_workers() -> usize {
    1
}

/// Results table: feature_id, statistic, df, p_value, method, calibration,
/// failure.
pub fn batch_results_tsv(m: &ExpressionMatrix, outcomes: &[TestOutcome]) -> String {
    let mut out = String::new();
    out.push_str("feature_id\tstatistic\tdf\tp_value\tmethod\tcalibration\tfailure\n");
    for (id, o) in m.feature_ids().iter().zip(outcomes) {
        let fmt_opt = |v: Option<f64>| match v {
            Some(v) => format!("{v:.10e}"),
            None => "NA".into(),
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            id,
            fmt_opt(o.statistic),
            fmt_opt(o.df),
            fmt_opt(o.p_value),
            o.method,
            o.calibration,
            o.failure.as_deref().unwrap_or("-")
        )
        .expect("writing to string");
    }
    out
}

/// Timing table: method, calibration, rows, n_x, n_y, seconds_serial,
/// seconds_parallel, parallel_workers, tests, failures.
pub fn timing_report_tsv(r: &TimingReport) -> String {
    let mut out = String::new();
    out.push_str("method\tcalibration\trows\tn_x\tn_y\tseconds_serial\tseconds_parallel\tparallel_workers\ttests\tfailures\n");
    for e in &r.entries {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{:.4}\t{:.4}\t{}\t{}\t{}",
            e.method,
            e.calibration,
            r.rows,
            r.n_x,
            r.n_y,
            e.seconds_serial,
            e.seconds_parallel,
            e.parallel_workers,
            e.tests,
            e.failures
        )
        .expect("writing to string");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_matrix_shape() {
        let m = synthetic_null_matrix(20, 5, 7, 3).unwrap();
        assert_eq!(m.rows(), 20);
        assert_eq!(m.cols(), 12);
        assert_eq!(m.group_sizes(), (5, 7));
        let (a, b) = m.split_row(0);
        assert_eq!(a.len(), 5);
        assert_eq!(b.len(), 7);
    }

    #[test]
    fn batch_welch_matches_row_by_row() {
        let m = synthetic_null_matrix(50, 6, 8, 11).unwrap();
        let out = batch_test(&m, Method::Welch, CalibrationTag::StudentT, 1).unwrap();
        assert_eq!(out.len(), 50);
        for (r, o) in out.iter().enumerate() {
            let (a, b) = m.split_row(r);
            let x = Sample::new(a).unwrap();
            let y = Sample::new(b).unwrap();
            let w = crate::testing::welch_statistic(&x, &y).unwrap();
            assert_eq!(o.statistic, Some(w.t_w));
            assert_eq!(o.df, Some(w.nu));
        }
    }

    #[test]
    fn constant_row_reports_unit_pvalue() {
        let m = ExpressionMatrix {
            feature_ids: vec!["f0".into()],
            values: vec![2.0; 8],
            cols: 8,
            group_labels: vec![true, true, true, true, false, false, false, false],
            group_names: ("a".into(), "b".into()),
        };
        let out = batch_test(&m, Method::Welch, CalibrationTag::StudentT, 0).unwrap();
        assert_eq!(out[0].statistic, Some(0.0));
        assert_eq!(out[0].p_value, Some(1.0));
        assert!(out[0].failure.is_none());
        // EL on the same row has no open-range overlap.
        let out = batch_test(&m, Method::El, CalibrationTag::ChiSq1, 0).unwrap();
        assert_eq!(out[0].failure.as_deref(), Some("NoOverlap"));
        assert_eq!(out[0].p_value, None);
    }

    #[test]
    fn wmw_not_batchable() {
        let m = synthetic_null_matrix(3, 3, 3, 0).unwrap();
        assert!(matches!(
            batch_test(&m, Method::Wmw, CalibrationTag::StdNormal, 0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn null_matrix_welch_rate_near_alpha() {
        let m = synthetic_null_matrix(1000, 50, 50, 77).unwrap();
        let out = batch_test(&m, Method::Welch, CalibrationTag::StudentT, 1).unwrap();
        let rate = out
            .iter()
            .filter(|o| o.p_value.map(|p| p <= 0.05).unwrap_or(false))
            .count() as f64
            / 1000.0;
        // Binomial band around 0.05 for 1000 rows, widened per the contract.
        assert!((0.0365 - 0.02..=0.0635 + 0.02).contains(&rate), "rate={rate}");
    }
}
