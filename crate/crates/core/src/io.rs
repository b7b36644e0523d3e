//! Artifact files: `result.json`, `report.json`, `report.csv`, trace CSVs
//! and `sweep.csv`, each with a matching reader.
//!
//! JSON artifacts carry a [`Metadata`] block (timestamp, hostname) that is
//! not part of the determinism contract; compare the `payload` fields.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bench::{ExperimentReport, SweepRow};
use crate::Scalar;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub hostname: String,
    pub version: String,
}

impl Metadata {
    pub fn now() -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let hostname = std::env::var("HOSTNAME")
            .ok()
            .or_else(|| std::fs::read_to_string("/etc/hostname").ok())
            .map(|h| h.trim().to_string())
            .unwrap_or_default();
        Self { timestamp, hostname, version: env!("CARGO_PKG_VERSION").to_string() }
    }
}

/// A JSON artifact: volatile metadata plus the deterministic payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact<P> {
    pub metadata: Metadata,
    pub payload: P,
}

impl<P> Artifact<P> {
    pub fn new(payload: P) -> Self {
        Self { metadata: Metadata::now(), payload }
    }
}

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path).map(BufWriter::new).map_err(|source| IoError::File { path: path_str(path), source })
}

pub fn write_json<P: Serialize>(path: &Path, value: &P) -> Result<(), IoError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| IoError::Json { path: path_str(path), source })?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|source| IoError::File { path: path_str(path), source })
}

pub fn read_json<P: DeserializeOwned>(path: &Path) -> Result<P, IoError> {
    let f = File::open(path).map_err(|source| IoError::File { path: path_str(path), source })?;
    serde_json::from_reader(BufReader::new(f)).map_err(|source| IoError::Json { path: path_str(path), source })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>, IoError> {
    Ok(csv::Writer::from_writer(create(path)?))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv { path: path_str(path), source }
}

fn read_csv<R: DeserializeOwned>(path: &Path, header: &[&str]) -> Result<Vec<R>, IoError> {
    let mut rdr = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let found: Vec<String> = rdr.headers().map_err(csv_err(path))?.iter().map(str::to_string).collect();
    if found != header {
        return Err(IoError::Format {
            path: path_str(path),
            message: format!("expected header {:?}, found {:?}", header.join(","), found.join(",")),
        });
    }
    rdr.deserialize().collect::<Result<Vec<R>, _>>().map_err(csv_err(path))
}

fn write_csv<R: Serialize>(path: &Path, rows: &[R], header: &[&str]) -> Result<(), IoError> {
    let mut w = csv_writer(path)?;
    if rows.is_empty() {
        w.write_record(header).map_err(csv_err(path))?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| IoError::File { path: path_str(path), source })
}

/// One line of the MAX/MIN/AVE table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub method: String,
    pub max: f64,
    pub min: f64,
    pub ave: f64,
    pub runs: usize,
    pub missing: usize,
    pub evaluations: usize,
}

pub const REPORT_HEADER: [&str; 7] = ["method", "max", "min", "ave", "runs", "missing", "evaluations"];

pub fn report_rows<T: Scalar>(report: &ExperimentReport<T>) -> Vec<ReportRow> {
    report
        .methods
        .iter()
        .map(|m| ReportRow {
            method: m.method.clone(),
            max: m.max.as_f64(),
            min: m.min.as_f64(),
            ave: m.ave.as_f64(),
            runs: m.per_seed.len(),
            missing: m.missing.len(),
            evaluations: m.evaluations,
        })
        .collect()
}

pub fn write_report_csv(path: &Path, rows: &[ReportRow]) -> Result<(), IoError> {
    write_csv(path, rows, &REPORT_HEADER)
}

pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>, IoError> {
    read_csv(path, &REPORT_HEADER)
}

/// Fixed-width rendering of the table. Numbers use the same shortest
/// round-trip form as the CSV, so a re-read CSV renders identically.
pub fn format_report_table(rows: &[ReportRow]) -> String {
    let cells: Vec<[String; 5]> = rows
        .iter()
        .map(|r| [r.method.clone(), format!("{:?}", r.max), format!("{:?}", r.min), format!("{:?}", r.ave), r.evaluations.to_string()])
        .collect();
    let head = ["METHOD", "MAX", "MIN", "AVE", "EVALS"].map(str::to_string);
    let mut width = head.clone().map(|h| h.len());
    for c in &cells {
        for (w, s) in width.iter_mut().zip(c) {
            *w = (*w).max(s.len());
        }
    }
    let line = |c: &[String; 5]| {
        let parts: Vec<String> = c.iter().zip(width).map(|(s, w)| format!("{s:<w$}")).collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&head);
    out.push('\n');
    for c in &cells {
        out.push_str(&line(c));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub incumbent: f64,
}

pub const TRACE_HEADER: [&str; 2] = ["iteration", "incumbent"];

pub fn write_trace_csv<T: Scalar>(path: &Path, trace: &[T]) -> Result<(), IoError> {
    let rows: Vec<TraceRow> =
        trace.iter().enumerate().map(|(iteration, v)| TraceRow { iteration, incumbent: v.as_f64() }).collect();
    write_csv(path, &rows, &TRACE_HEADER)
}

pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>, IoError> {
    read_csv(path, &TRACE_HEADER)
}

pub const SWEEP_HEADER: [&str; 2] = ["omega", "ave_best"];

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), IoError> {
    write_csv(path, rows, &SWEEP_HEADER)
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, IoError> {
    read_csv(path, &SWEEP_HEADER)
}
