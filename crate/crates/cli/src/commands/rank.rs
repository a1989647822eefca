use std::fs::File;

use hqf_core::data::CHANNELS;
use hqf_core::eval::{patient_rank_scores, report, RankView};
use log::info;

use super::create_report;
use crate::config::RunConfig;
use crate::failure::{AtStage, CliResult, Failure, Stage};
use crate::layout::Layout;

/// Patient-wise ranking of the evaluated models, per channel and per
/// horizon, from the per-subject table written by `evaluate`.
pub fn cmd_rank(config: &RunConfig) -> CliResult<()> {
    let path = Layout::new(&config.output_dir).report("metrics_per_subject.csv");
    let file = File::open(&path).map_err(|e| {
        Failure::new(
            Stage::Evaluation,
            format!("{}: {e} (run evaluate first)", path.display()),
        )
    })?;
    let (hash, table) = report::read_per_subject(file).at(Stage::Evaluation)?;
    if hash != config.hash {
        return Err(Failure::new(
            Stage::Evaluation,
            format!(
                "{} belongs to config {hash}, current config is {}",
                path.display(),
                config.hash
            ),
        ));
    }

    let present = table.models();
    let models: Vec<String> = config
        .variant_names()
        .into_iter()
        .filter(|m| present.contains(m))
        .collect();
    if models.len() < 2 {
        return Err(Failure::new(
            Stage::Config,
            format!(
                "ranking needs at least 2 evaluated models, found {}",
                models.len()
            ),
        ));
    }

    let mut views: Vec<RankView> = (0..CHANNELS.len()).map(RankView::Task).collect();
    views.extend(table.horizons().into_iter().map(RankView::Horizon));
    let results = views
        .iter()
        .map(|&view| patient_rank_scores(&table, &models, view))
        .collect::<Result<Vec<_>, _>>()
        .at(Stage::Evaluation)?;
    for r in &results {
        let scores: Vec<String> = r
            .models
            .iter()
            .zip(&r.scores)
            .map(|(m, s)| format!("{m} {s:.3}"))
            .collect();
        info!("{}: {}", r.view.label(), scores.join(", "));
    }
    report::write_ranking(
        create_report(config, "ranking.csv")?,
        &results,
        &config.hash,
    )
    .at(Stage::Evaluation)
}
