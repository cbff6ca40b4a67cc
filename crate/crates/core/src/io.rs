//! CSV ingestion and result serialization.
//!
//! Input is UTF-8, comma-delimited, with a header row and `.` decimals.
//! Missing cells are rejected. JSON output uses the shortest representation
//! that round-trips; CSV output writes floats with 17 significant digits.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::measures::Method;
use crate::screening::{ScreeningResult, ThresholdRule};
use crate::sim::MetricsReport;
use crate::tuning::RidgeSelection;

const MISSING_TOKENS: [&str; 6] = ["", "na", "nan", "null", "none", "?"];

/// Predictors and responses read from one table.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedData {
    pub x: DataMatrix,
    pub y: DataMatrix,
    pub predictor_names: Vec<String>,
    pub response_names: Vec<String>,
}

fn resolve_column(headers: &[String], spec: &str) -> Result<usize> {
    if let Some(i) = headers.iter().position(|h| h == spec) {
        return Ok(i);
    }
    // fall back to a 1-based column number
    match spec.parse::<usize>() {
        Ok(k) if (1..=headers.len()).contains(&k) => Ok(k - 1),
        _ => Err(Error::arg(format!(
            "response column {spec:?} not found in header"
        ))),
    }
}

/// Reads a table and splits off the response columns (by header name, or by
/// 1-based column number when no header matches). Remaining columns keep
/// their order as predictors.
pub fn read_csv<R: Read>(reader: R, response_columns: &[String]) -> Result<LoadedData> {
    if response_columns.is_empty() {
        return Err(Error::arg("at least one response column is required"));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut response_idx = Vec::with_capacity(response_columns.len());
    for spec in response_columns {
        let idx = resolve_column(&headers, spec)?;
        if response_idx.contains(&idx) {
            return Err(Error::arg(format!("response column {spec:?} given twice")));
        }
        response_idx.push(idx);
    }
    let predictor_idx: Vec<usize> = (0..headers.len())
        .filter(|i| !response_idx.contains(i))
        .collect();
    if predictor_idx.is_empty() {
        return Err(Error::arg(
            "no predictor columns left after removing the response",
        ));
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        let mut values = Vec::with_capacity(headers.len());
        for (c, cell) in record.iter().enumerate() {
            if MISSING_TOKENS.contains(&cell.to_ascii_lowercase().as_str()) {
                return Err(Error::Data(format!(
                    "missing value at row {row}, column {}",
                    c + 1
                )));
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                row,
                column: c + 1,
                value: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::Data(format!(
                    "non-finite value at row {row}, column {}",
                    c + 1
                )));
            }
            values.push(v);
        }
        rows.push(values);
    }
    let n = rows.len();
    let take =
        |cols: &[usize]| DataMatrix::new(DMatrix::from_fn(n, cols.len(), |i, j| rows[i][cols[j]]));
    Ok(LoadedData {
        x: take(&predictor_idx)?,
        y: take(&response_idx)?,
        predictor_names: predictor_idx.iter().map(|&i| headers[i].clone()).collect(),
        response_names: response_idx.iter().map(|&i| headers[i].clone()).collect(),
    })
}

pub fn load_csv(path: &Path, response_columns: &[String]) -> Result<LoadedData> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    read_csv(file, response_columns)
}

/// Float with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a matrix with a header row.
pub fn write_matrix_csv<W: Write>(
    writer: W,
    names: &[String],
    values: &DMatrix<f64>,
) -> Result<()> {
    if names.len() != values.ncols() {
        return Err(Error::DimensionMismatch {
            expected: values.ncols(),
            got: names.len(),
        });
    }
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(names)?;
    for i in 0..values.nrows() {
        w.write_record((0..values.ncols()).map(|j| format_float(values[(i, j)])))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::arg(format!(
                "unknown output format {other:?} (expected json or csv)"
            ))),
        }
    }
}

impl OutputFormat {
    /// Format implied by a file extension, JSON otherwise.
    pub fn from_path(path: Option<&Path>) -> Self {
        match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictorEntry {
    pub index: usize,
    pub name: String,
    pub score: f64,
    pub rank: usize,
}

/// Serialized form of a screening run. Field order is part of the format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreenReport {
    pub method: Method,
    pub n: usize,
    pub p: usize,
    pub response: Vec<String>,
    pub epsilon: Option<f64>,
    pub response_gamma: Option<f64>,
    pub threshold: ThresholdRule,
    pub m: usize,
    pub gcv: Option<RidgeSelection>,
    pub selected: Vec<PredictorEntry>,
    pub predictors: Vec<PredictorEntry>,
    pub wall_time_secs: f64,
}

impl ScreenReport {
    pub fn new(
        result: &ScreeningResult,
        n: usize,
        predictor_names: &[String],
        response_names: &[String],
        threshold: ThresholdRule,
        wall_time_secs: f64,
    ) -> Self {
        let p = result.scores.len();
        let mut rank = vec![0; p];
        for (k, &r) in result.ranking.iter().enumerate() {
            rank[r] = k + 1;
        }
        let entry = |r: usize| PredictorEntry {
            index: r,
            name: predictor_names
                .get(r)
                .cloned()
                .unwrap_or_else(|| format!("x{}", r + 1)),
            score: result.scores[r].value,
            rank: rank[r],
        };
        Self {
            method: result.method,
            n,
            p,
            response: response_names.to_vec(),
            epsilon: result.epsilon,
            response_gamma: result.response_gamma,
            threshold,
            m: result.m,
            gcv: result.tuning.clone(),
            selected: result.selected.iter().map(|&r| entry(r)).collect(),
            predictors: (0..p).map(entry).collect(),
            wall_time_secs,
        }
    }

    pub fn write<W: Write>(&self, mut writer: W, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut writer, self)?;
                writeln!(writer)?;
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(writer);
                w.write_record(["index", "name", "score", "rank", "selected"])?;
                for e in &self.predictors {
                    let selected = e.rank <= self.m;
                    w.write_record([
                        e.index.to_string(),
                        e.name.clone(),
                        format_float(e.score),
                        e.rank.to_string(),
                        selected.to_string(),
                    ])?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

/// Writes a simulation report. CSV rows are `suite,model,method,label,value`.
pub fn write_metrics<W: Write>(
    report: &MetricsReport,
    mut writer: W,
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut writer, report)?;
            writeln!(writer)?;
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(writer);
            w.write_record(["suite", "model", "method", "label", "value"])?;
            for m in &report.methods {
                let mut row = |label: String, value: f64| {
                    w.write_record([
                        report.suite.to_string(),
                        report.model.to_string(),
                        m.method.to_string(),
                        label,
                        format_float(value),
                    ])
                };
                for (q, v) in ["25%", "50%", "75%"].iter().zip(m.s_quantiles) {
                    row(format!("S@{q}"), v)?;
                }
                for (k, (d, v)) in report.d_values.iter().zip(m.p_proportions).enumerate() {
                    row(format!("P@d{}={d}", k + 1), v)?;
                }
            }
            w.flush()?;
        }
    }
    Ok(())
}
