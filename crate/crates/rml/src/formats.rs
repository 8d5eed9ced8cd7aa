//! On-disk formats.
//!
//! * metric: JSON `{"dim": d, "rows": [[...], ...]}`
//! * trace: CSV with header `iter,objective,dual,gap,seconds`
//! * bench report: CSV `method,mean,std,n_seeds` plus a text table
//! * per-seed results: CSV `method,seed,lambda,test_error`
//! * η sweep: CSV `eta,method,mean,std`
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing a
//! written file gives back the same bits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use rml_core::{Metric, SolverTrace, SymmetricMatrix, TraceRecord};

use crate::config::Method;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

fn invalid(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Invalid {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct MetricFile {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

pub fn metric_to_json(metric: &Metric) -> String {
    let file = MetricFile {
        dim: metric.dim(),
        rows: metric.matrix().to_rows(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("metric serializes");
    s.push('\n');
    s
}

/// Parses a metric file; rows must be square, symmetric and PSD within tolerance.
pub fn metric_from_json(text: &str) -> Result<Metric, FormatError> {
    let file: MetricFile = serde_json::from_str(text)?;
    if file.rows.len() != file.dim {
        return Err(invalid(
            1,
            format!("dim {} but {} rows", file.dim, file.rows.len()),
        ));
    }
    for (i, row) in file.rows.iter().enumerate() {
        if row.len() != file.dim {
            return Err(invalid(1, format!("row {i} has {} entries", row.len())));
        }
        for (j, v) in row.iter().enumerate() {
            if *v != file.rows[j][i] {
                return Err(invalid(1, format!("entry ({i},{j}) breaks symmetry")));
            }
        }
    }
    let m = SymmetricMatrix::from_rows(&file.rows).map_err(|e| invalid(1, e.to_string()))?;
    Metric::new(m).map_err(|e| invalid(1, e.to_string()))
}

pub const TRACE_HEADER: &str = "iter,objective,dual,gap,seconds";

pub fn trace_to_csv(trace: &SolverTrace) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for r in trace.iter() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iter, r.objective, r.dual, r.gap, r.seconds
        );
    }
    out
}

fn field<T: std::str::FromStr>(
    rec: &csv::StringRecord,
    i: usize,
    line: usize,
) -> Result<T, FormatError> {
    let raw = rec
        .get(i)
        .ok_or_else(|| invalid(line, format!("missing field {i}")))?;
    raw.parse()
        .map_err(|_| invalid(line, format!("bad value {raw:?} in field {i}")))
}

fn check_header(rdr: &mut csv::Reader<&[u8]>, expected: &str) -> Result<(), FormatError> {
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != expected {
        return Err(invalid(
            1,
            format!("expected header {expected:?}, found {header:?}"),
        ));
    }
    Ok(())
}

pub fn trace_from_csv(text: &str) -> Result<SolverTrace, FormatError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, TRACE_HEADER)?;
    let mut trace = SolverTrace::default();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        trace.push(TraceRecord {
            iter: field(&rec, 0, line)?,
            objective: field(&rec, 1, line)?,
            dual: field(&rec, 2, line)?,
            gap: field(&rec, 3, line)?,
            seconds: field(&rec, 4, line)?,
        });
    }
    Ok(trace)
}

/// One method's outcome on one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedResult {
    pub method: Method,
    pub seed: u64,
    /// Selected regularization; `None` for the Euclidean baseline.
    pub lambda: Option<f64>,
    pub test_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub mean: f64,
    pub std: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
    pub per_seed: Vec<SeedResult>,
}

impl BenchReport {
    pub fn row(&self, method: Method) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

pub const REPORT_HEADER: &str = "method,mean,std,n_seeds";
pub const PER_SEED_HEADER: &str = "method,seed,lambda,test_error";

pub fn report_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.method.name(),
            r.mean,
            r.std,
            r.n_seeds
        );
    }
    out
}

fn method_field(rec: &csv::StringRecord, line: usize) -> Result<Method, FormatError> {
    let raw = rec.get(0).unwrap_or("");
    Method::from_name(raw).ok_or_else(|| invalid(line, format!("unknown method {raw:?}")))
}

pub fn report_from_csv(text: &str) -> Result<Vec<ReportRow>, FormatError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, REPORT_HEADER)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            Ok(ReportRow {
                method: method_field(&rec, line)?,
                mean: field(&rec, 1, line)?,
                std: field(&rec, 2, line)?,
                n_seeds: field(&rec, 3, line)?,
            })
        })
        .collect()
}

pub fn per_seed_to_csv(results: &[SeedResult]) -> String {
    let mut out = String::from(PER_SEED_HEADER);
    out.push('\n');
    for r in results {
        let lambda = r.lambda.map(|l| l.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.method.name(),
            r.seed,
            lambda,
            r.test_error
        );
    }
    out
}

pub fn per_seed_from_csv(text: &str) -> Result<Vec<SeedResult>, FormatError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, PER_SEED_HEADER)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            let lambda = match rec.get(2) {
                Some("") | None => None,
                Some(_) => Some(field(&rec, 2, line)?),
            };
            Ok(SeedResult {
                method: method_field(&rec, line)?,
                seed: field(&rec, 1, line)?,
                lambda,
                test_error: field(&rec, 3, line)?,
            })
        })
        .collect()
}

/// Human-readable table in percent, `mean ± std`.
pub fn report_table(title: &str, rows: &[ReportRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(
        out,
        "{:<18} {:>18} {:>7}",
        "method", "test error (%)", "seeds"
    );
    for r in rows {
        let cell = format!("{:.2} ± {:.2}", 100.0 * r.mean, 100.0 * r.std);
        let _ = writeln!(out, "{:<18} {:>18} {:>7}", r.method.name(), cell, r.n_seeds);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eta: f64,
    pub method: Method,
    pub mean: f64,
    pub std: f64,
}

pub const SWEEP_HEADER: &str = "eta,method,mean,std";

pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.eta, r.method.name(), r.mean, r.std);
    }
    out
}

pub fn sweep_from_csv(text: &str) -> Result<Vec<SweepRow>, FormatError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    check_header(&mut rdr, SWEEP_HEADER)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let line = i + 2;
            let raw = rec.get(1).unwrap_or("");
            Ok(SweepRow {
                eta: field(&rec, 0, line)?,
                method: Method::from_name(raw)
                    .ok_or_else(|| invalid(line, format!("unknown method {raw:?}")))?,
                mean: field(&rec, 2, line)?,
                std: field(&rec, 3, line)?,
            })
        })
        .collect()
}
