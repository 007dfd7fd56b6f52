//! Report emission (CSV / JSON) and run manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::BoundReport;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "n,k,ell,delta,h_bits,bound_t16,bound_t17,bound_t18,exact_log2,gap,runtime_s";

#[derive(thiserror::Error, Debug)]
pub enum ReportError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// One CSV row; JSON rows use the same fields in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub delta: f64,
    pub h_bits: f64,
    pub bound_t16: f64,
    pub bound_t17: f64,
    pub bound_t18: f64,
    pub exact_log2: Option<f64>,
    pub gap: Option<f64>,
    pub runtime_s: f64,
}

impl From<&BoundReport> for ReportRow {
    fn from(r: &BoundReport) -> Self {
        ReportRow {
            n: r.n,
            k: r.k,
            ell: r.ell,
            delta: r.delta,
            h_bits: r.h_bits,
            bound_t16: r.bound_t16,
            bound_t17: r.bound_t17,
            bound_t18: r.bound_t18,
            exact_log2: r.exact_log2,
            gap: r.gap,
            runtime_s: r.runtime_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
    pub rows: Vec<ReportRow>,
}

pub fn emit_report<W: Write>(rows: &[BoundReport], format: Format, config_hash: Option<&str>, out: W) -> Result<(), ReportError> {
    let rows: Vec<ReportRow> = rows.iter().map(ReportRow::from).collect();
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
            w.write_record(CSV_HEADER.split(','))?;
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        Format::Json => {
            let report = JsonReport { schema_version: SCHEMA_VERSION, config_hash: config_hash.map(str::to_string), rows };
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out).map_err(serde_json::Error::io)?;
        }
    }
    Ok(())
}

pub fn write_report(path: &Path, rows: &[BoundReport], format: Format, config_hash: Option<&str>) -> Result<(), ReportError> {
    let file = std::fs::File::create(path).map_err(|e| ReportError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    emit_report(rows, format, config_hash, std::io::BufWriter::new(file))
}

pub fn parse_csv_report(text: &str) -> Result<Vec<ReportRow>, ReportError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<ReportRow>, _>>()?)
}

pub fn parse_json_report(text: &str) -> Result<JsonReport, ReportError> {
    Ok(serde_json::from_str(text)?)
}

/// What produced an artifact: enough to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seeds: Vec<u64>,
    pub config_hash: String,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
}

/// SHA-256 of the config's JSON serialization, hex encoded.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("serializable config");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unix_now() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn new<T: Serialize>(command_line: Vec<String>, seeds: Vec<u64>, config: &T) -> Self {
        RunManifest {
            command_line,
            seeds,
            config_hash: config_hash(config),
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: unix_now(),
            finished_unix: 0,
            outputs: Vec::new(),
        }
    }

    /// Writes `<artifact>.manifest.json` beside the artifact.
    pub fn write_beside(&mut self, artifact: &Path) -> Result<PathBuf, ReportError> {
        self.finished_unix = unix_now();
        self.outputs = vec![artifact.display().to_string()];
        let mut name = artifact.as_os_str().to_owned();
        name.push(".manifest.json");
        let path = PathBuf::from(name);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text).map_err(|e| ReportError::Io { path: path.clone(), message: e.to_string() })?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::theorem_bounds;

    fn sample() -> BoundReport {
        let mut r = theorem_bounds(6, 3, 2, 4.0 / 6.0, 6.643856189774724).unwrap();
        r.exact_log2 = Some(60f64.log2());
        r.gap = Some(60f64.log2() - r.bound_t18);
        r.runtime_s = 0.001234;
        r
    }

    #[test]
    fn empty_csv_has_header() {
        let mut buf = Vec::new();
        emit_report(&[], Format::Csv, None, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn one_row_csv() {
        let mut buf = Vec::new();
        let mut r = sample();
        emit_report(std::slice::from_ref(&r), Format::Csv, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back = parse_csv_report(&text).unwrap();
        assert_eq!(back, vec![ReportRow::from(&r)]);
        r.exact_log2 = None;
        r.gap = None;
        let mut buf = Vec::new();
        emit_report(std::slice::from_ref(&r), Format::Csv, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().contains(",,"));
        assert_eq!(parse_csv_report(&text).unwrap()[0].gap, None);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let r = sample();
        let mut buf = Vec::new();
        emit_report(std::slice::from_ref(&r), Format::Json, Some("abc"), &mut buf).unwrap();
        let back = parse_json_report(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.schema_version, SCHEMA_VERSION);
        assert_eq!(back.rows[0].bound_t16.to_bits(), r.bound_t16.to_bits());
        assert_eq!(back.rows[0].h_bits.to_bits(), r.h_bits.to_bits());
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&crate::pipeline::PipelineConfig::default());
        let b = config_hash(&crate::pipeline::PipelineConfig::default());
        assert_eq!(a, b);
        assert_eq!(a.len(), 64);
        let c = config_hash(&crate::pipeline::PipelineConfig { seed: 1, ..Default::default() });
        assert_ne!(a, c);
    }
}
