use hqf_core::data::CorruptionKind;
use hqf_core::eval::{report, robustness_sweep, RobustnessPoint};
use hqf_core::Variant;
use log::info;
use rayon::prelude::*;

use super::{
    create_report, load_trained, require_checkpoints, selected_folds, thread_pool, Corpus,
};
use crate::config::RunConfig;
use crate::failure::{AtStage, CliResult, Stage};

/// Re-evaluates trained models on corrupted test inputs, one pass per level
/// of the chosen corruption, and writes `robustness_<kind>.csv`.
pub fn cmd_ablate(config: &RunConfig, kind: CorruptionKind) -> CliResult<()> {
    let specs = config.ablation.specs(kind)?;
    let corpus = Corpus::load(&config.manifest)?;
    let folds = selected_folds(config, &corpus, None)?;
    require_checkpoints(config, &folds)?;
    let tasks: Vec<(Variant, usize)> = config
        .variants
        .iter()
        .flat_map(|&v| folds.iter().map(move |&k| (v, k)))
        .collect();

    let pool = thread_pool(config.jobs)?;
    let results: Vec<CliResult<Vec<RobustnessPoint>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(variant, k)| {
                let params = load_trained(config, variant, k)?;
                let fold = corpus.fold(k);
                let (_, windows) = corpus.test_windows(fold, config.model(variant)?);
                let points = robustness_sweep(
                    &params,
                    variant.name(),
                    &fold.test_subject,
                    &windows,
                    &specs,
                )
                .at(Stage::Evaluation)?;
                info!("{variant} fold {k}: {} {} levels", specs.len(), kind.name());
                Ok(points)
            })
            .collect()
    });
    let mut points = Vec::new();
    for r in results {
        points.extend(r?);
    }
    let name = format!("robustness_{}.csv", kind.name());
    report::write_robustness(create_report(config, &name)?, &points, &config.hash)
        .at(Stage::Evaluation)
}
