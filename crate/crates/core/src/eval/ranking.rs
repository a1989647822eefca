use std::collections::BTreeSet;

use super::metrics::{Metric, MetricTable, View};
use crate::data::CHANNELS;
use crate::error::{Error, Result};

/// What a patient-wise ranking averages RMSE over before ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RankView {
    /// One channel, RMSE averaged across horizons.
    Task(usize),
    /// One horizon, RMSE averaged across channels.
    Horizon(usize),
}

impl RankView {
    pub fn label(&self) -> String {
        match *self {
            RankView::Task(t) => CHANNELS[t].to_string(),
            RankView::Horizon(h) => format!("h{h}"),
        }
    }

    fn as_view(&self) -> View {
        match *self {
            RankView::Task(t) => View::Task(t),
            RankView::Horizon(h) => View::Horizon(h),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingResult {
    pub view: RankView,
    pub models: Vec<String>,
    /// Normalized score per model, aligned with `models`.
    pub scores: Vec<f64>,
    /// Raw per-subject scores (`m` for the best model, 1 for the worst).
    pub subject_scores: Vec<(String, Vec<f64>)>,
}

impl RankingResult {
    pub fn score(&self, model: &str) -> Option<f64> {
        self.models
            .iter()
            .position(|m| m == model)
            .map(|i| self.scores[i])
    }
}

/// Scores `m, m-1, …, 1` by ascending error; tied errors share the average
/// of the scores they span.
fn scores_for(errors: &[f64]) -> Vec<f64> {
    let m = errors.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| errors[a].total_cmp(&errors[b]));
    let mut scores = vec![0.0; m];
    let mut i = 0;
    while i < m {
        let mut j = i;
        while j + 1 < m && errors[order[j + 1]] == errors[order[i]] {
            j += 1;
        }
        // Ranks i+1..=j+1, averaged.
        let avg_rank = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            scores[k] = m as f64 + 1.0 - avg_rank;
        }
        i = j + 1;
    }
    scores
}

/// Ranks models per subject by the view's averaged RMSE and normalizes the
/// summed scores by `m · N`.
pub fn patient_rank_scores(
    table: &MetricTable,
    models: &[String],
    view: RankView,
) -> Result<RankingResult> {
    if models.is_empty() {
        return Err(Error::Evaluation("ranking needs at least one model".into()));
    }
    let subjects: BTreeSet<String> = table.subjects(&models[0]).into_iter().collect();
    for m in models {
        let s: BTreeSet<String> = table.subjects(m).into_iter().collect();
        if s != subjects {
            return Err(Error::Evaluation(format!(
                "models {} and {m} were evaluated on different subjects",
                models[0]
            )));
        }
    }
    if subjects.is_empty() {
        return Err(Error::Evaluation("no subjects to rank".into()));
    }

    let m = models.len();
    let mut totals = vec![0.0; m];
    let mut subject_scores = Vec::with_capacity(subjects.len());
    for subject in &subjects {
        let errors = models
            .iter()
            .map(|model| {
                table
                    .subject_value(model, subject, view.as_view(), Metric::Rmse)
                    .ok_or_else(|| {
                        Error::Evaluation(format!(
                            "{model}: subject {subject} has no cells for {}",
                            view.label()
                        ))
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        let scores = scores_for(&errors);
        for (t, s) in totals.iter_mut().zip(&scores) {
            *t += s;
        }
        subject_scores.push((subject.clone(), scores));
    }
    let norm = (m * subjects.len()) as f64;
    Ok(RankingResult {
        view,
        models: models.to_vec(),
        scores: totals.into_iter().map(|t| t / norm).collect(),
        subject_scores,
    })
}
