use hqf_core::data::destandardize;
use hqf_core::eval::{avg_wins, compute_errors, evaluate_windows, report, CellKey, MetricTable};
use hqf_core::model::predict_batch;
use hqf_core::nn::Tensor;
use hqf_core::Variant;
use log::info;
use rayon::prelude::*;

use super::{
    create_report, load_trained, require_checkpoints, selected_folds, thread_pool, Corpus,
};
use crate::config::RunConfig;
use crate::failure::{AtStage, CliResult, Stage};

struct FoldTables {
    standardized: MetricTable,
    raw: Option<MetricTable>,
}

/// Scores every configured variant on the held-out subject of every
/// selected fold and writes the metric tables and AvgWins.
pub fn cmd_evaluate(config: &RunConfig) -> CliResult<()> {
    let corpus = Corpus::load(&config.manifest)?;
    let folds = selected_folds(config, &corpus, None)?;
    require_checkpoints(config, &folds)?;
    let tasks: Vec<(Variant, usize)> = config
        .variants
        .iter()
        .flat_map(|&v| folds.iter().map(move |&k| (v, k)))
        .collect();

    let pool = thread_pool(config.jobs)?;
    let results: Vec<CliResult<FoldTables>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(v, k)| evaluate_one(config, &corpus, v, k))
            .collect()
    });
    let mut table = MetricTable::default();
    let mut raw_table = MetricTable::default();
    for result in results {
        let tables = result?;
        table.merge(tables.standardized);
        if let Some(raw) = tables.raw {
            raw_table.merge(raw);
        }
    }

    let models = config.variant_names();
    let wins = avg_wins(&table, &models).at(Stage::Evaluation)?;
    for (model, pct) in &wins {
        info!("AvgWins {model}: {pct:.2}%");
    }

    report::write_metrics(
        create_report(config, "metrics.csv")?,
        &table,
        &models,
        &config.hash,
    )
    .at(Stage::Evaluation)?;
    report::write_per_subject(
        create_report(config, "metrics_per_subject.csv")?,
        &table,
        &config.hash,
    )
    .at(Stage::Evaluation)?;
    report::write_summary(
        create_report(config, "summary.csv")?,
        &table,
        &models,
        &config.hash,
    )
    .at(Stage::Evaluation)?;
    report::write_avg_wins(
        create_report(config, "avg_wins.csv")?,
        &wins,
        &models,
        &config.hash,
    )
    .at(Stage::Evaluation)?;
    if config.raw_units {
        report::write_metrics(
            create_report(config, "metrics_raw_units.csv")?,
            &raw_table,
            &models,
            &config.hash,
        )
        .at(Stage::Evaluation)?;
    }
    Ok(())
}

fn evaluate_one(
    config: &RunConfig,
    corpus: &Corpus,
    variant: Variant,
    fold_index: usize,
) -> CliResult<FoldTables> {
    let params = load_trained(config, variant, fold_index)?;
    let model = config.model(variant)?;
    let fold = corpus.fold(fold_index);
    let (raw_windows, windows) = corpus.test_windows(fold, model);
    let standardized = evaluate_windows(&params, variant.name(), &fold.test_subject, &windows)
        .at(Stage::Evaluation)?;

    let raw = if config.raw_units {
        let inputs: Vec<&Tensor> = windows.iter().map(|w| &w.input).collect();
        let preds: Vec<Tensor> = predict_batch(&params, &inputs)
            .at(Stage::Evaluation)?
            .iter()
            .map(|p| destandardize(p, &fold.stats))
            .collect();
        let targets: Vec<Tensor> = raw_windows.iter().map(|w| w.targets.clone()).collect();
        let mut t = MetricTable::default();
        for (task, horizon, m) in
            compute_errors(&preds, &targets, &params.horizons).at(Stage::Evaluation)?
        {
            t.insert(
                CellKey {
                    model: variant.name().to_string(),
                    subject: fold.test_subject.clone(),
                    task,
                    horizon,
                },
                m,
            );
        }
        Some(t)
    } else {
        None
    };
    info!(
        "{variant} fold {fold_index}: evaluated {} windows",
        windows.len()
    );
    Ok(FoldTables { standardized, raw })
}
