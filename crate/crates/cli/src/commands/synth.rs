use std::path::Path;

use hqf_core::data::synthetic::synthetic_corpus;
use hqf_core::data::write_recording_csv;
use log::info;

use crate::failure::{AtStage, CliResult, Stage};

/// Writes a synthetic corpus (one CSV per subject plus `manifest.csv`) for
/// smoke tests and demos.
pub fn cmd_synth(out: &Path, subjects: usize, duration: usize, seed: u64) -> CliResult<()> {
    std::fs::create_dir_all(out).at(Stage::Config)?;
    let mut manifest = String::from("subject_id,path\n");
    for rec in synthetic_corpus(subjects, duration, seed) {
        let file = format!("subject_{}.csv", rec.subject_id);
        write_recording_csv(&rec, &out.join(&file)).at(Stage::Ingestion)?;
        manifest.push_str(&format!("{},{file}\n", rec.subject_id));
    }
    std::fs::write(out.join("manifest.csv"), manifest).at(Stage::Config)?;
    info!("wrote {subjects} synthetic subjects to {}", out.display());
    Ok(())
}
