//! CSV emitters for evaluation results.
//!
//! Every file opens with a `# config_hash=<hex>` line so tables produced by
//! different run configurations cannot be silently mixed. The rest is plain
//! CSV with a header row.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use super::metrics::{CellKey, CellMetrics, Metric, MetricTable, Summary, View};
use super::ranking::RankingResult;
use super::robustness::RobustnessPoint;
use crate::data::{CorruptionKind, CHANNELS};
use crate::error::{Error, Result};

const HASH_PREFIX: &str = "# config_hash=";

fn writer<W: Write>(mut out: W, hash: &str) -> Result<csv::Writer<W>> {
    writeln!(out, "{HASH_PREFIX}{hash}")?;
    Ok(csv::Writer::from_writer(out))
}

/// Reads the config hash from the first line of an emitted file.
pub fn read_config_hash<R: BufRead>(mut input: R) -> Result<String> {
    let mut line = String::new();
    input.read_line(&mut line)?;
    line.trim_end()
        .strip_prefix(HASH_PREFIX)
        .map(str::to_string)
        .ok_or_else(|| Error::Evaluation("missing config hash header line".into()))
}

fn task_index(name: &str) -> Result<usize> {
    CHANNELS
        .iter()
        .position(|c| *c == name)
        .ok_or_else(|| Error::Evaluation(format!("unknown task {name:?}")))
}

/// One row per model × task × horizon with mean and sample std over subjects.
pub fn write_metrics<W: Write>(
    out: W,
    table: &MetricTable,
    models: &[String],
    hash: &str,
) -> Result<()> {
    let mut w = writer(out, hash)?;
    w.write_record([
        "model",
        "task",
        "horizon",
        "n_subjects",
        "mae_mean",
        "mae_std",
        "rmse_mean",
        "rmse_std",
    ])?;
    for model in models {
        for (task, name) in CHANNELS.iter().enumerate() {
            for &horizon in &table.horizons() {
                let view = View::Cell { task, horizon };
                let (Some(mae), Some(rmse)) = (
                    table.aggregate(model, view, Metric::Mae),
                    table.aggregate(model, view, Metric::Rmse),
                ) else {
                    continue;
                };
                w.write_record([
                    model.clone(),
                    name.to_string(),
                    horizon.to_string(),
                    mae.n.to_string(),
                    mae.mean.to_string(),
                    mae.std.to_string(),
                    rmse.mean.to_string(),
                    rmse.std.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// The raw per-subject cells, enough to rebuild the whole table.
pub fn write_per_subject<W: Write>(out: W, table: &MetricTable, hash: &str) -> Result<()> {
    let mut w = writer(out, hash)?;
    w.write_record(["model", "subject", "task", "horizon", "mae", "rmse"])?;
    for (key, m) in table.iter() {
        w.write_record([
            key.model.clone(),
            key.subject.clone(),
            CHANNELS[key.task].to_string(),
            key.horizon.to_string(),
            m.mae.to_string(),
            m.rmse.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_per_subject`]; returns the embedded hash and the table.
pub fn read_per_subject<R: Read>(input: R) -> Result<(String, MetricTable)> {
    let mut input = std::io::BufReader::new(input);
    let hash = read_config_hash(&mut input)?;
    let mut reader = csv::Reader::from_reader(input);
    let mut table = MetricTable::default();
    for record in reader.records() {
        let r = record?;
        if r.len() != 6 {
            return Err(Error::Evaluation(format!(
                "expected 6 columns, found {}",
                r.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            r[i].parse()
                .map_err(|_| Error::Evaluation(format!("bad number {:?}", &r[i])))
        };
        table.insert(
            CellKey {
                model: r[0].to_string(),
                subject: r[1].to_string(),
                task: task_index(&r[2])?,
                horizon: r[3]
                    .parse()
                    .map_err(|_| Error::Evaluation(format!("bad horizon {:?}", &r[3])))?,
            },
            CellMetrics {
                mae: num(4)?,
                rmse: num(5)?,
            },
        );
    }
    Ok((hash, table))
}

/// Per-task, per-horizon and macro views for every model.
pub fn write_summary<W: Write>(
    out: W,
    table: &MetricTable,
    models: &[String],
    hash: &str,
) -> Result<()> {
    let mut views: Vec<View> = (0..CHANNELS.len()).map(View::Task).collect();
    views.extend(table.horizons().into_iter().map(View::Horizon));
    views.push(View::Macro);

    let mut w = writer(out, hash)?;
    w.write_record(["model", "view", "metric", "n_subjects", "mean", "std"])?;
    for model in models {
        for view in &views {
            for metric in [Metric::Mae, Metric::Rmse] {
                if let Some(s) = table.aggregate(model, *view, metric) {
                    write_summary_row(&mut w, model, &view.label(), metric, &s)?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_summary_row<W: Write>(
    w: &mut csv::Writer<W>,
    model: &str,
    label: &str,
    metric: Metric,
    s: &Summary,
) -> Result<()> {
    w.write_record([
        model.to_string(),
        label.to_string(),
        metric.name().to_string(),
        s.n.to_string(),
        s.mean.to_string(),
        s.std.to_string(),
    ])?;
    Ok(())
}

pub fn write_avg_wins<W: Write>(
    out: W,
    wins: &BTreeMap<String, f64>,
    models: &[String],
    hash: &str,
) -> Result<()> {
    let mut w = writer(out, hash)?;
    w.write_record(["model", "avg_wins_pct"])?;
    for model in models {
        if let Some(v) = wins.get(model) {
            w.write_record([model.clone(), v.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ranking<W: Write>(out: W, results: &[RankingResult], hash: &str) -> Result<()> {
    let mut w = writer(out, hash)?;
    w.write_record(["model", "view", "score"])?;
    for r in results {
        let label = r.view.label();
        for (model, score) in r.models.iter().zip(&r.scores) {
            w.write_record([model.clone(), label.clone(), score.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Collapses per-subject robustness points to one row per model × level ×
/// metric, keeping the order in which groups first appear.
pub fn write_robustness<W: Write>(out: W, points: &[RobustnessPoint], hash: &str) -> Result<()> {
    type Group<'a> = ((String, CorruptionKind, f64), Vec<&'a RobustnessPoint>);
    let mut groups: Vec<Group> = Vec::new();
    for p in points {
        let key = (p.model.clone(), p.kind, p.level);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(p),
            None => groups.push((key, vec![p])),
        }
    }

    let mut w = writer(out, hash)?;
    w.write_record([
        "model",
        "kind",
        "level",
        "metric",
        "n_subjects",
        "mean",
        "std",
    ])?;
    for ((model, kind, level), pts) in &groups {
        for metric in [Metric::Mae, Metric::Rmse] {
            let values: Vec<f64> = pts
                .iter()
                .map(|p| match metric {
                    Metric::Mae => p.macro_mae,
                    Metric::Rmse => p.macro_rmse,
                })
                .collect();
            let s = Summary::of(&values).expect("group is non-empty");
            w.write_record([
                model.clone(),
                kind.name().to_string(),
                level.to_string(),
                format!("macro_{}", metric.name()),
                s.n.to_string(),
                s.mean.to_string(),
                s.std.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
