//! Sample, chain and report file formats.
//!
//! Samples are JSON objects `{"t": [...], "X": [...], "W": [...], "n": N}`
//! (`n` optional) or CSV with a `t,X,W` header. Reports and chains are CSV
//! with a header row and LF line endings.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use weibcv_core::bayes::McmcChain;
use weibcv_core::{CensoredSample, Parameter};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: line {line}, field `{field}`: {message}")]
    Parse { path: PathBuf, line: u64, field: String, message: String },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Data {
        path: PathBuf,
        #[source]
        source: weibcv_core::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

/// Read a sample, choosing JSON or CSV from the extension, or from the
/// first non-blank character when there is none.
pub fn read_sample(path: &Path) -> Result<CensoredSample, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let is_json = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("json") => true,
        Some(e) if e.eq_ignore_ascii_case("csv") => false,
        _ => text.trim_start().starts_with('{'),
    };
    if is_json {
        parse_sample_json(&text, path)
    } else {
        parse_sample_csv(&text, path)
    }
}

pub fn parse_sample_json(text: &str, path: &Path) -> Result<CensoredSample, IoError> {
    if text.trim().is_empty() {
        return Err(IoError::Format { path: path.to_path_buf(), message: "file is empty".into() });
    }
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        field: format!("column {}", e.column()),
        message: e.to_string(),
    })
}

pub fn parse_sample_csv(text: &str, path: &Path) -> Result<CensoredSample, IoError> {
    let format_err = |message: String| IoError::Format { path: path.to_path_buf(), message };
    if text.trim().is_empty() {
        return Err(format_err("file is empty".into()));
    }
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| format_err(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| format_err(format!("missing column `{name}` (expected header t,X,W)")))
    };
    let (ti, xi, wi) = (column("t")?, column("X")?, column("W")?);

    let (mut t, mut x, mut w) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| format_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |idx: usize, name: &str| {
            record.get(idx).ok_or_else(|| IoError::Parse {
                path: path.to_path_buf(),
                line,
                field: name.into(),
                message: "missing value".into(),
            })
        };
        let parse_err = |name: &str, raw: &str, e: String| IoError::Parse {
            path: path.to_path_buf(),
            line,
            field: name.into(),
            message: format!("cannot parse `{raw}`: {e}"),
        };
        let raw = field(ti, "t")?;
        t.push(raw.parse::<f64>().map_err(|e| parse_err("t", raw, e.to_string()))?);
        let raw = field(xi, "X")?;
        x.push(raw.parse::<u64>().map_err(|e| parse_err("X", raw, e.to_string()))?);
        let raw = field(wi, "W")?;
        w.push(raw.parse::<u64>().map_err(|e| parse_err("W", raw, e.to_string()))?);
    }
    if t.is_empty() {
        return Err(format_err("no data rows".into()));
    }
    CensoredSample::from_counts(t, x, w).map_err(|source| IoError::Data { path: path.to_path_buf(), source })
}

pub fn sample_to_json(sample: &CensoredSample) -> String {
    let mut s = serde_json::to_string_pretty(sample).expect("sample serialises");
    s.push('\n');
    s
}

pub fn write_sample(path: &Path, sample: &CensoredSample) -> Result<(), IoError> {
    fs::write(path, sample_to_json(sample)).map_err(io_err(path))
}

/// Chain as CSV: `iter,kappa,tau,cv_p,cv_k`, one retained state per row.
pub fn chain_to_csv(chain: &McmcChain) -> String {
    let rows: Vec<Vec<String>> = chain
        .states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let iter = chain.config.burn_in + (k + 1) * chain.config.thin;
            let mut row = vec![iter.to_string()];
            row.extend(Parameter::ALL.iter().map(|&p| s.get(p).to_string()));
            row
        })
        .collect();
    crate::table::to_csv(&["iter", "kappa", "tau", "cv_p", "cv_k"], &rows)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}
