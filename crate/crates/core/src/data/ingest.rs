//! CSV ingestion of per-subject numerics.
//!
//! Layout: a header row naming a time column and the four channels, then
//! one row per second. Header matching ignores case, surrounding whitespace
//! and a trailing unit in brackets, and accepts the BIDMC numerics names:
//!
//! | channel | accepted headers |
//! |---------|------------------|
//! | time    | `time`, `Time [s]` |
//! | HR      | `HR` |
//! | SpO2    | `SpO2` |
//! | Pulse   | `PULSE`, `Pulse` |
//! | RR      | `RESP`, `RR` |
//!
//! Extra columns are ignored. Blank, `NaN` or non-numeric channel cells are
//! treated as missing and filled forward, then backward for a leading gap;
//! the count per channel is kept in [`SubjectRecording::imputed`].

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::corruption::impute_forward_backward;
use super::{SubjectRecording, CHANNELS, NUM_CHANNELS};
use crate::error::{Error, Result};
use crate::nn::Tensor;

const TIME_TOLERANCE: f64 = 1e-6;

fn normalize_header(h: &str) -> String {
    let h = h.trim();
    let h = match h.find('[') {
        Some(i) => &h[..i],
        None => h,
    };
    h.trim().to_ascii_lowercase()
}

fn aliases(channel: usize) -> &'static [&'static str] {
    match channel {
        0 => &["hr"],
        1 => &["spo2"],
        2 => &["pulse"],
        3 => &["resp", "rr"],
        _ => unreachable!(),
    }
}

fn ingest_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Ingest {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads and validates one recording.
pub fn ingest_recording(path: &Path, subject_id: &str) -> Result<SubjectRecording> {
    let file = std::fs::File::open(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| ingest_error(path, 1, e.to_string()))?
        .iter()
        .map(normalize_header)
        .collect();
    let time_col = headers
        .iter()
        .position(|h| h == "time")
        .ok_or_else(|| ingest_error(path, 1, "missing time column"))?;
    let mut channel_cols = [0usize; NUM_CHANNELS];
    for (c, col) in channel_cols.iter_mut().enumerate() {
        *col = headers
            .iter()
            .position(|h| aliases(c).contains(&h.as_str()))
            .ok_or_else(|| {
                ingest_error(
                    path,
                    1,
                    format!(
                        "missing {} column (accepted headers: {})",
                        CHANNELS[c],
                        aliases(c).join(", ")
                    ),
                )
            })?;
    }

    let mut columns: [Vec<f64>; NUM_CHANNELS] = Default::default();
    let mut prev_time: Option<f64> = None;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            ingest_error(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let time: f64 = record
            .get(time_col)
            .and_then(|v| v.parse().ok())
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| ingest_error(path, line, "unparseable timestamp"))?;
        if let Some(prev) = prev_time {
            let dt = time - prev;
            if dt.abs() < TIME_TOLERANCE {
                return Err(ingest_error(
                    path,
                    line,
                    format!("duplicate timestamp {time}"),
                ));
            }
            if dt < 0.0 {
                return Err(ingest_error(
                    path,
                    line,
                    format!("timestamp {time} goes backwards"),
                ));
            }
            if (dt - 1.0).abs() > TIME_TOLERANCE {
                return Err(ingest_error(
                    path,
                    line,
                    format!("irregular sampling: {dt} s step at timestamp {time}"),
                ));
            }
        }
        prev_time = Some(time);
        for (c, col) in channel_cols.iter().enumerate() {
            let value = record
                .get(*col)
                .and_then(|v| v.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .unwrap_or(f64::NAN);
            columns[c].push(value);
        }
    }

    let duration = columns[0].len();
    if duration == 0 {
        return Err(ingest_error(path, 2, "no data rows"));
    }
    let mut imputed = [0usize; NUM_CHANNELS];
    for (c, column) in columns.iter_mut().enumerate() {
        if column.iter().all(|v| v.is_nan()) {
            return Err(ingest_error(
                path,
                1,
                format!("{} column has no numeric values", CHANNELS[c]),
            ));
        }
        imputed[c] = impute_forward_backward(column, 0.0);
    }
    let mut data = Vec::with_capacity(duration * NUM_CHANNELS);
    for t in 0..duration {
        data.extend(columns.iter().map(|col| col[t]));
    }
    let mut rec = SubjectRecording::new(
        subject_id,
        Tensor::from_vec(&[duration, NUM_CHANNELS], data)?,
    )?;
    rec.imputed = imputed;
    Ok(rec)
}

/// Writes a recording in the canonical layout (`time,HR,SpO2,Pulse,RR`).
pub fn write_recording_csv(rec: &SubjectRecording, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["time".to_string()];
    header.extend(CHANNELS.iter().map(|c| c.to_string()));
    w.write_record(&header)?;
    for t in 0..rec.duration() {
        let mut row = vec![t.to_string()];
        row.extend(rec.series.row(t).iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub subject_id: String,
    pub path: PathBuf,
}

/// Reads a `subject_id,path` manifest. Relative paths are resolved against
/// the manifest's directory; lines starting with `#` are comments.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let file = std::fs::File::open(path).map_err(|e| Error::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let headers: Vec<String> = reader.headers()?.iter().map(normalize_header).collect();
    let id_col = headers.iter().position(|h| h == "subject_id");
    let path_col = headers.iter().position(|h| h == "path");
    let (Some(id_col), Some(path_col)) = (id_col, path_col) else {
        return Err(ingest_error(
            path,
            1,
            "manifest needs subject_id and path columns",
        ));
    };
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id = record.get(id_col).unwrap_or("").to_string();
        let rel = record.get(path_col).unwrap_or("");
        if id.is_empty() || rel.is_empty() {
            return Err(ingest_error(path, line, "empty subject_id or path"));
        }
        let p = Path::new(rel);
        let resolved = if p.is_absolute() {
            p.to_path_buf()
        } else {
            base.join(p)
        };
        entries.push(ManifestEntry {
            subject_id: id,
            path: resolved,
        });
    }
    if entries.is_empty() {
        return Err(Error::Config(format!("{}: no subjects", path.display())));
    }
    Ok(entries)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SubjectSummary {
    pub subject_id: String,
    pub path: String,
    pub duration_s: usize,
    pub imputed: BTreeMap<String, usize>,
}

impl SubjectSummary {
    pub fn of(rec: &SubjectRecording, path: &Path) -> Self {
        Self {
            subject_id: rec.subject_id.clone(),
            path: path.display().to_string(),
            duration_s: rec.duration(),
            imputed: CHANNELS
                .iter()
                .zip(rec.imputed)
                .map(|(c, n)| (c.to_string(), n))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RejectedSubject {
    pub subject_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct IngestionReport {
    pub subjects: Vec<SubjectSummary>,
    pub rejected: Vec<RejectedSubject>,
    pub errors: Vec<RejectedSubject>,
}
