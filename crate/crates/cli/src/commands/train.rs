use std::collections::BTreeMap;

use hqf_core::data::prepare_fold;
use hqf_core::model::{train_fold, EpochStats};
use hqf_core::nn::Checkpoint;
use hqf_core::Variant;
use log::{error, info};
use rayon::prelude::*;

use super::{check_hash, selected_folds, thread_pool, Corpus};
use crate::config::RunConfig;
use crate::failure::{AtStage, CliResult, Failure, Stage};
use crate::layout::Layout;

enum Outcome {
    Trained,
    Skipped,
}

/// Trains every requested (variant, fold) pair that has no checkpoint yet.
/// A failing pair does not stop the others; the command fails at the end
/// with the stage of the first failure.
pub fn cmd_train(config: &RunConfig, folds_override: Option<&str>) -> CliResult<()> {
    config.ensure_output_dir()?;
    let corpus = Corpus::load(&config.manifest)?;
    let folds = selected_folds(config, &corpus, folds_override)?;
    let tasks: Vec<(Variant, usize)> = config
        .variants
        .iter()
        .flat_map(|&v| folds.iter().map(move |&k| (v, k)))
        .collect();
    info!(
        "training {} task(s) for config {} into {}",
        tasks.len(),
        config.hash,
        config.output_dir.display()
    );

    let pool = thread_pool(config.jobs)?;
    let results: Vec<CliResult<Outcome>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(v, k)| train_one(config, &corpus, v, k))
            .collect()
    });

    let mut first_failure = None;
    let (mut trained, mut skipped) = (0, 0);
    for ((variant, fold), result) in tasks.iter().zip(results) {
        match result {
            Ok(Outcome::Trained) => trained += 1,
            Ok(Outcome::Skipped) => skipped += 1,
            Err(f) => {
                error!("{variant} fold {fold} failed: {f}");
                first_failure.get_or_insert(f);
            }
        }
    }
    info!("{trained} trained, {skipped} skipped");
    match first_failure {
        None => Ok(()),
        Some(f) => Err(f),
    }
}

fn train_one(
    config: &RunConfig,
    corpus: &Corpus,
    variant: Variant,
    fold_index: usize,
) -> CliResult<Outcome> {
    let layout = Layout::new(&config.output_dir);
    let ckpt_path = layout.checkpoint(variant, fold_index);
    if ckpt_path.is_file() {
        let existing = Checkpoint::load(&ckpt_path).at(Stage::Training)?;
        check_hash(&existing, config, &ckpt_path, Stage::Config)?;
        info!("{variant} fold {fold_index}: skipped, checkpoint present");
        return Ok(Outcome::Skipped);
    }

    let model = config.model(variant)?;
    let fold = corpus.fold(fold_index);
    let data = prepare_fold(
        fold,
        &corpus.recordings,
        model.window,
        &model.horizons,
        model.stride,
        model.val_fraction,
    )
    .at(Stage::Config)?;
    info!(
        "{variant} fold {fold_index} (test subject {}): {} train, {} val windows",
        fold.test_subject,
        data.train.len(),
        data.val.len()
    );
    let outcome = train_fold(model, &data.train, &data.val)
        .map_err(|e| Failure::new(Stage::Training, format!("{variant} fold {fold_index}: {e}")))?;
    if let Some(last) = outcome.trace.last() {
        info!(
            "{variant} fold {fold_index}: final train loss {:.6}",
            last.train_loss
        );
    }

    std::fs::create_dir_all(layout.fold_dir(variant, fold_index)).at(Stage::Training)?;
    write_trace(
        &layout.loss_trace(variant, fold_index),
        &config.hash,
        &outcome.trace,
    )?;
    let meta = BTreeMap::from([
        ("config_hash".to_string(), config.hash.clone()),
        ("fold".to_string(), fold_index.to_string()),
        ("test_subject".to_string(), fold.test_subject.clone()),
        ("seed".to_string(), model.seed.to_string()),
    ]);
    // The checkpoint is written last: its presence marks the task complete.
    outcome
        .params
        .to_checkpoint(&meta)
        .save(&ckpt_path)
        .at(Stage::Training)?;
    Ok(Outcome::Trained)
}

fn write_trace(path: &std::path::Path, hash: &str, trace: &[EpochStats]) -> CliResult<()> {
    let mut out = String::new();
    out.push_str(&format!(
        "# config_hash={hash}\nepoch,train_loss,val_loss\n"
    ));
    for e in trace {
        let val = e.val_loss.map_or(String::new(), |v| v.to_string());
        out.push_str(&format!("{},{},{}\n", e.epoch, e.train_loss, val));
    }
    std::fs::write(path, out)
        .map_err(|e| Failure::new(Stage::Training, format!("{}: {e}", path.display())))
}
