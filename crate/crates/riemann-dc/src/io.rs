//! File formats and machine-readable reports.
//!
//! Dense matrices are read from either a plain whitespace format ("m n" on
//! the first line, then m rows of n numbers) or a CSV variant whose first
//! line is "# m,n". Run results are emitted as a JSON document plus a
//! fixed-header CSV summary row.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::spca::SpcaMetrics;
use crate::trace::SolveTrace;

#[derive(Debug, Error)]
pub enum MatrixParseError {
    #[error("empty input")]
    Empty,
    #[error("line {line}: bad dimension header '{text}'")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: non-numeric token '{token}'")]
    BadToken { line: usize, token: String },
    #[error("expected {expected} data rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("dimensions must be positive, got {m} x {n}")]
    BadDimensions { m: usize, n: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses a dense matrix from text. A leading '#' selects the CSV variant
/// ("# m,n" header, comma-separated rows); otherwise the plain whitespace
/// format is expected. Line numbers in errors are 1-based.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, MatrixParseError> {
    let mut lines = text.lines().enumerate();
    let (header_idx, header) = loop {
        match lines.next() {
            Some((i, l)) if l.trim().is_empty() => {
                let _ = i;
                continue;
            }
            Some((i, l)) => break (i, l),
            None => return Err(MatrixParseError::Empty),
        }
    };
    let csv = header.trim_start().starts_with('#');
    let (m, n) = parse_header(header_idx + 1, header, csv)?;
    if m == 0 || n == 0 {
        return Err(MatrixParseError::BadDimensions { m, n });
    }
    // growth is bounded by the actual input size, not the claimed header
    let mut values = Vec::with_capacity(m.saturating_mul(n).min(1 << 16));
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows == m {
            return Err(MatrixParseError::MissingRows {
                expected: m,
                found: rows + 1,
            });
        }
        let tokens: Vec<&str> = if csv {
            line.split(',').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        let tokens: Vec<&str> = tokens.into_iter().filter(|t| !t.is_empty()).collect();
        if tokens.len() != n {
            return Err(MatrixParseError::RaggedRow {
                line: line_no,
                expected: n,
                found: tokens.len(),
            });
        }
        for tok in tokens {
            let v: f64 = tok.parse().map_err(|_| MatrixParseError::BadToken {
                line: line_no,
                token: tok.to_string(),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    if rows != m {
        return Err(MatrixParseError::MissingRows {
            expected: m,
            found: rows,
        });
    }
    Ok(DMatrix::from_row_slice(m, n, &values))
}

fn parse_header(line: usize, text: &str, csv: bool) -> Result<(usize, usize), MatrixParseError> {
    let bad = || MatrixParseError::BadHeader {
        line,
        text: text.to_string(),
    };
    let body = if csv {
        text.trim_start().trim_start_matches('#')
    } else {
        text
    };
    let parts: Vec<&str> = if csv {
        body.split(',').map(str::trim).collect()
    } else {
        body.split_whitespace().collect()
    };
    let parts: Vec<&str> = parts.into_iter().filter(|p| !p.is_empty()).collect();
    if parts.len() != 2 {
        return Err(bad());
    }
    let m = parts[0].parse().map_err(|_| bad())?;
    let n = parts[1].parse().map_err(|_| bad())?;
    Ok((m, n))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>, MatrixParseError> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

/// Plain-format text with 17 significant digits, which round-trips f64
/// exactly through `parse_matrix`.
pub fn format_matrix(mat: &DMatrix<f64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", mat.nrows(), mat.ncols());
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{:.16e}", mat[(i, j)]);
        }
        out.push('\n');
    }
    out
}

pub fn save_matrix(path: impl AsRef<Path>, mat: &DMatrix<f64>) -> Result<(), MatrixParseError> {
    std::fs::write(path, format_matrix(mat))?;
    Ok(())
}

#[derive(Debug, Error)]
pub enum SpecParseError {
    #[error("bad key=value pair '{0}'")]
    BadPair(String),
    #[error("unknown key '{0}' (expected seed, m, n)")]
    UnknownKey(String),
    #[error("bad value for {key}: '{value}'")]
    BadValue { key: String, value: String },
    #[error("missing required key '{0}'")]
    Missing(&'static str),
}

/// Instance-generation spec "seed=1,m=50,n=200" (seed optional; `m` and `n`
/// required).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenerateSpec {
    pub seed: Option<u64>,
    pub m: usize,
    pub n: usize,
}

pub fn parse_generate_spec(text: &str) -> Result<GenerateSpec, SpecParseError> {
    let mut seed = None;
    let mut m = None;
    let mut n = None;
    for pair in text.split(',') {
        let pair = pair.trim();
        if pair.is_empty() {
            continue;
        }
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| SpecParseError::BadPair(pair.to_string()))?;
        let key = key.trim();
        let value = value.trim();
        let bad = || SpecParseError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "seed" => seed = Some(value.parse().map_err(|_| bad())?),
            "m" => m = Some(value.parse().map_err(|_| bad())?),
            "n" => n = Some(value.parse().map_err(|_| bad())?),
            other => return Err(SpecParseError::UnknownKey(other.to_string())),
        }
    }
    Ok(GenerateSpec {
        seed,
        m: m.ok_or(SpecParseError::Missing("m"))?,
        n: n.ok_or(SpecParseError::Missing("n"))?,
    })
}

/// Fixed CSV summary header; column roles follow the benchmark tables
/// (outer iterations, mean inner iterations, total and subproblem time, the
/// ℓ0-model objective, scaled variance, sparsity).
pub const CSV_HEADER: &str = "r,iter_out,iter_in_mean,time_s,time_sub_s,obj,v_sc,s_p";

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SummaryRow {
    pub r: usize,
    pub iter_out: usize,
    pub iter_in_mean: f64,
    pub time_s: f64,
    pub time_sub_s: f64,
    pub obj: f64,
    pub v_sc: f64,
    pub s_p: f64,
}

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{:.4},{:.6},{:.6},{},{},{}",
            self.r,
            self.iter_out,
            self.iter_in_mean,
            self.time_s,
            self.time_sub_s,
            self.obj,
            self.v_sc,
            self.s_p
        )
    }
}

/// Wall-clock fields, grouped so determinism comparisons can drop them.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Timing {
    pub time_s: f64,
    pub time_sub_s: f64,
}

/// The JSON document for a single solve: configuration echo, seed,
/// column-oriented trace, counters, termination and metrics.
#[derive(Serialize)]
pub struct RunReport<C: Serialize> {
    pub config: C,
    pub seed: Option<u64>,
    pub trace: crate::trace::TraceArrays,
    pub counters: Counters,
    pub termination: crate::trace::Termination,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<SpcaMetrics>,
    pub timing: Timing,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Counters {
    pub outer_iters: usize,
    pub grad_evals: usize,
    pub retractions: usize,
    pub prox_evals: usize,
    pub inner_iters: usize,
}

impl<C: Serialize> RunReport<C> {
    pub fn new(
        config: C,
        seed: Option<u64>,
        trace: &SolveTrace,
        metrics: Option<SpcaMetrics>,
    ) -> Self {
        Self {
            config,
            seed,
            trace: trace.arrays(),
            counters: Counters {
                outer_iters: trace.outer_iters,
                grad_evals: trace.grad_evals,
                retractions: trace.retractions,
                prox_evals: trace.prox_evals,
                inner_iters: trace.inner_iters,
            },
            termination: trace.termination,
            metrics,
            timing: Timing {
                time_s: trace.time_s,
                time_sub_s: trace.time_sub_s,
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Summary row for a solve trace plus metrics.
pub fn summary_row(r: usize, trace: &SolveTrace, obj: f64, metrics: &SpcaMetrics) -> SummaryRow {
    SummaryRow {
        r,
        iter_out: trace.outer_iters,
        iter_in_mean: trace.inner_mean(),
        time_s: trace.time_s,
        time_sub_s: trace.time_sub_s,
        obj,
        v_sc: metrics.v_sc,
        s_p: metrics.s_p,
    }
}

/// Removes every timing field (the `timing` objects and `time_s`/`time_sub_s`
/// keys) from a JSON document, for byte-level determinism comparisons.
pub fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.remove("timing");
            map.remove("time_s");
            map.remove("time_sub_s");
            for (_, v) in map.iter_mut() {
                strip_timing(v);
            }
        }
        serde_json::Value::Array(items) => {
            for v in items.iter_mut() {
                strip_timing(v);
            }
        }
        _ => {}
    }
}
