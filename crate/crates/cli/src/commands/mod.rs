mod ablate;
mod evaluate;
mod ingest;
mod rank;
mod synth;
mod train;

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

pub use ablate::cmd_ablate;
pub use evaluate::cmd_evaluate;
pub use ingest::cmd_ingest;
pub use rank::cmd_rank;
pub use synth::cmd_synth;
pub use train::cmd_train;

use hqf_core::data::{
    build_windows, ingest_recording, make_lopo_folds, read_manifest, standardize, FoldSpec,
    SubjectRecording, WindowSample,
};
use hqf_core::nn::Checkpoint;
use hqf_core::{HybridModelParams, ModelConfig, Variant};
use log::info;
use rayon::ThreadPool;

use crate::config::{parse_folds, RunConfig};
use crate::failure::{AtStage, CliResult, Failure, Stage};
use crate::layout::Layout;

/// All recordings of the manifest and the leave-one-out folds over them.
pub struct Corpus {
    pub recordings: Vec<SubjectRecording>,
    pub folds: Vec<FoldSpec>,
}

impl Corpus {
    pub fn load(manifest: &Path) -> CliResult<Self> {
        let entries = read_manifest(manifest).at(Stage::Ingestion)?;
        let recordings = entries
            .iter()
            .map(|e| ingest_recording(&e.path, &e.subject_id))
            .collect::<Result<Vec<_>, _>>()
            .at(Stage::Ingestion)?;
        let folds = make_lopo_folds(&recordings).at(Stage::Config)?;
        info!(
            "loaded {} subjects from {}",
            recordings.len(),
            manifest.display()
        );
        Ok(Self { recordings, folds })
    }

    pub fn fold(&self, index: usize) -> &FoldSpec {
        &self.folds[index - 1]
    }

    pub fn recording(&self, subject: &str) -> &SubjectRecording {
        self.recordings
            .iter()
            .find(|r| r.subject_id == subject)
            .expect("fold subjects come from the corpus")
    }

    /// Unstandardized and standardized test windows of one fold.
    pub fn test_windows(
        &self,
        fold: &FoldSpec,
        model: &ModelConfig,
    ) -> (Vec<WindowSample>, Vec<WindowSample>) {
        let raw = build_windows(
            self.recording(&fold.test_subject),
            model.window,
            &model.horizons,
            model.stride,
        );
        let standardized = raw.iter().map(|w| standardize(w, &fold.stats)).collect();
        (raw, standardized)
    }
}

pub fn selected_folds(
    config: &RunConfig,
    corpus: &Corpus,
    override_spec: Option<&str>,
) -> CliResult<Vec<usize>> {
    let spec = override_spec.or(config.folds.as_deref()).unwrap_or("all");
    parse_folds(spec, corpus.folds.len())
}

pub fn thread_pool(jobs: usize) -> CliResult<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .at(Stage::Config)
}

/// Loads the checkpoint of one (variant, fold), refusing files written
/// under a different configuration.
pub fn load_trained(
    config: &RunConfig,
    variant: Variant,
    fold: usize,
) -> CliResult<HybridModelParams> {
    let path = Layout::new(&config.output_dir).checkpoint(variant, fold);
    let ckpt = Checkpoint::load(&path).at(Stage::Evaluation)?;
    check_hash(&ckpt, config, &path, Stage::Evaluation)?;
    HybridModelParams::from_checkpoint(&ckpt).at(Stage::Evaluation)
}

pub fn check_hash(
    ckpt: &Checkpoint,
    config: &RunConfig,
    path: &Path,
    stage: Stage,
) -> CliResult<()> {
    let found = ckpt.meta("config_hash").unwrap_or("<none>");
    if found != config.hash {
        return Err(Failure::new(
            stage,
            format!(
                "{} was written under config {found}, current config is {}",
                path.display(),
                config.hash
            ),
        ));
    }
    Ok(())
}

/// Fails listing every (variant, fold) without a checkpoint.
pub fn require_checkpoints(config: &RunConfig, folds: &[usize]) -> CliResult<()> {
    let layout = Layout::new(&config.output_dir);
    let gaps: Vec<String> = config
        .variants
        .iter()
        .flat_map(|&v| folds.iter().map(move |&k| (v, k)))
        .filter(|&(v, k)| !layout.checkpoint(v, k).is_file())
        .map(|(v, k)| format!("{v}/fold_{k}"))
        .collect();
    if gaps.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(
            Stage::Evaluation,
            format!("missing checkpoints ({}): {}", gaps.len(), gaps.join(", ")),
        ))
    }
}

pub fn create_report(config: &RunConfig, name: &str) -> CliResult<BufWriter<File>> {
    let layout = Layout::new(&config.output_dir);
    std::fs::create_dir_all(layout.reports()).at(Stage::Evaluation)?;
    let path = layout.report(name);
    info!("writing {}", path.display());
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| Failure::new(Stage::Evaluation, format!("{}: {e}", path.display())))
}
