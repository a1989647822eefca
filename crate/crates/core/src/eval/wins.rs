use std::collections::BTreeMap;

use super::metrics::{Metric, MetricTable, View};
use crate::error::{Error, Result};

/// Percentage of task–horizon pairs each model wins.
///
/// Per pair, the subject-averaged MAE and the subject-averaged RMSE each
/// award half a win to the model with the lowest value, split equally among
/// exact ties. A model best on both metrics takes the whole pair, and the
/// percentages of all models add up to 100.
pub fn avg_wins(table: &MetricTable, models: &[String]) -> Result<BTreeMap<String, f64>> {
    let Some(first) = models.first() else {
        return Err(Error::Evaluation("AvgWins needs at least one model".into()));
    };
    let coverage = table.coverage(first);
    if coverage.is_empty() {
        return Err(Error::Evaluation(format!(
            "model {first} has no metric cells"
        )));
    }
    for m in &models[1..] {
        if table.coverage(m) != coverage {
            return Err(Error::Evaluation(format!(
                "models {first} and {m} cover different (task, horizon, subject) cells"
            )));
        }
    }
    let mut pairs: Vec<(usize, usize)> = coverage.iter().map(|(t, h, _)| (*t, *h)).collect();
    pairs.dedup();

    let mut wins: BTreeMap<String, f64> = models.iter().map(|m| (m.clone(), 0.0)).collect();
    for &(task, horizon) in &pairs {
        for metric in [Metric::Mae, Metric::Rmse] {
            let values: Vec<f64> = models
                .iter()
                .map(|m| {
                    table
                        .aggregate(m, View::Cell { task, horizon }, metric)
                        .map(|s| s.mean)
                        .unwrap_or(f64::INFINITY)
                })
                .collect();
            let best = values.iter().copied().fold(f64::INFINITY, f64::min);
            let tied: Vec<usize> = (0..models.len()).filter(|&i| values[i] == best).collect();
            for i in &tied {
                *wins.get_mut(&models[*i]).expect("model present") += 0.5 / tied.len() as f64;
            }
        }
    }
    let n = pairs.len() as f64;
    Ok(wins.into_iter().map(|(m, w)| (m, 100.0 * w / n)).collect())
}
