use std::path::Path;

use hqf_core::data::{
    ingest_recording, read_manifest, IngestionReport, RejectedSubject, SubjectSummary,
};
use log::{error, info, warn};

use crate::failure::{AtStage, CliResult, Failure, Stage};

/// Validates every recording of a manifest and writes a JSON report to
/// `output` (stdout when absent). Recordings too short for one
/// `window + max_horizon` span are listed as rejected; unreadable ones are
/// errors and make the command fail once the report is written.
pub fn cmd_ingest(
    manifest: &Path,
    output: Option<&Path>,
    window: usize,
    max_horizon: usize,
) -> CliResult<()> {
    let entries = read_manifest(manifest).at(Stage::Ingestion)?;
    let mut report = IngestionReport::default();
    for entry in &entries {
        match ingest_recording(&entry.path, &entry.subject_id) {
            Ok(rec) => {
                if rec.duration() < window + max_horizon {
                    warn!(
                        "{}: {} s is shorter than one window",
                        rec.subject_id,
                        rec.duration()
                    );
                    report.rejected.push(RejectedSubject {
                        subject_id: rec.subject_id.clone(),
                        reason: format!(
                            "duration {} s < window {window} s + horizon {max_horizon} s",
                            rec.duration()
                        ),
                    });
                }
                report.subjects.push(SubjectSummary::of(&rec, &entry.path));
            }
            Err(e) => {
                error!("{}: {e}", entry.subject_id);
                report.errors.push(RejectedSubject {
                    subject_id: entry.subject_id.clone(),
                    reason: e.to_string(),
                });
            }
        }
    }

    let json = serde_json::to_string_pretty(&report).at(Stage::Ingestion)?;
    match output {
        Some(path) => {
            std::fs::write(path, json + "\n")
                .map_err(|e| Failure::new(Stage::Ingestion, format!("{}: {e}", path.display())))?;
            info!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }

    if report.errors.is_empty() {
        info!(
            "{} subjects ingested, {} rejected",
            report.subjects.len(),
            report.rejected.len()
        );
        Ok(())
    } else {
        let detail: Vec<String> = report
            .errors
            .iter()
            .map(|e| format!("{}: {}", e.subject_id, e.reason))
            .collect();
        Err(Failure::new(
            Stage::Ingestion,
            format!(
                "{} of {} recordings failed:\n  {}",
                report.errors.len(),
                entries.len(),
                detail.join("\n  ")
            ),
        ))
    }
}
