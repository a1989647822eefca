use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use crate::data::{WindowSample, CHANNELS, NUM_CHANNELS};
use crate::error::{Error, Result};
use crate::model::{predict_batch, HybridModelParams};
use crate::nn::Tensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Mae,
    Rmse,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "mae",
            Metric::Rmse => "rmse",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub model: String,
    pub subject: String,
    /// Channel index into [`CHANNELS`].
    pub task: usize,
    /// Horizon in seconds.
    pub horizon: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMetrics {
    pub mae: f64,
    pub rmse: f64,
}

impl CellMetrics {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Mae => self.mae,
            Metric::Rmse => self.rmse,
        }
    }
}

/// Per-(subject, task, horizon) MAE and RMSE over one subject's windows.
///
/// `predictions[i]` and `targets[i]` are `horizons × 4`. An empty window set
/// yields no cells.
pub fn compute_errors(
    predictions: &[Tensor],
    targets: &[Tensor],
    horizons: &[usize],
) -> Result<Vec<(usize, usize, CellMetrics)>> {
    if predictions.len() != targets.len() {
        return Err(Error::Evaluation(format!(
            "{} predictions for {} targets",
            predictions.len(),
            targets.len()
        )));
    }
    if predictions.is_empty() {
        warn!("no windows to score; cells left absent");
        return Ok(Vec::new());
    }
    let shape = [horizons.len(), NUM_CHANNELS];
    for (p, t) in predictions.iter().zip(targets) {
        p.expect_shape(&shape)?;
        t.expect_shape(&shape)?;
    }
    let n = predictions.len() as f64;
    let mut out = Vec::with_capacity(shape[0] * shape[1]);
    for (k, &h) in horizons.iter().enumerate() {
        for c in 0..NUM_CHANNELS {
            let (mut abs, mut sq) = (0.0, 0.0);
            for (p, t) in predictions.iter().zip(targets) {
                let r = p.get2(k, c) - t.get2(k, c);
                abs += r.abs();
                sq += r * r;
            }
            out.push((
                c,
                h,
                CellMetrics {
                    mae: abs / n,
                    rmse: (sq / n).sqrt(),
                },
            ));
        }
    }
    Ok(out)
}

/// Predicts every window of one subject and returns its metric cells.
pub fn evaluate_windows(
    params: &HybridModelParams,
    model: &str,
    subject: &str,
    windows: &[WindowSample],
) -> Result<MetricTable> {
    let inputs: Vec<&Tensor> = windows.iter().map(|w| &w.input).collect();
    let preds = predict_batch(params, &inputs)?;
    let targets: Vec<Tensor> = windows.iter().map(|w| w.targets.clone()).collect();
    let mut table = MetricTable::default();
    for (task, horizon, m) in compute_errors(&preds, &targets, &params.horizons)? {
        table.insert(
            CellKey {
                model: model.to_string(),
                subject: subject.to_string(),
                task,
                horizon,
            },
            m,
        );
    }
    Ok(table)
}

/// Which cells a subject-level value averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    Cell {
        task: usize,
        horizon: usize,
    },
    /// One channel, averaged across horizons.
    Task(usize),
    /// One horizon, averaged across channels.
    Horizon(usize),
    /// All task–horizon pairs.
    Macro,
}

impl View {
    fn contains(&self, task: usize, horizon: usize) -> bool {
        match *self {
            View::Cell {
                task: t,
                horizon: h,
            } => t == task && h == horizon,
            View::Task(t) => t == task,
            View::Horizon(h) => h == horizon,
            View::Macro => true,
        }
    }

    pub fn label(&self) -> String {
        match *self {
            View::Cell { task, horizon } => format!("{}@{horizon}", CHANNELS[task]),
            View::Task(t) => CHANNELS[t].to_string(),
            View::Horizon(h) => format!("h{h}"),
            View::Macro => "macro".to_string(),
        }
    }
}

/// Mean and sample standard deviation over subjects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, n })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricTable {
    cells: BTreeMap<CellKey, CellMetrics>,
}

impl MetricTable {
    pub fn insert(&mut self, key: CellKey, metrics: CellMetrics) {
        self.cells.insert(key, metrics);
    }

    pub fn merge(&mut self, other: MetricTable) {
        self.cells.extend(other.cells);
    }

    pub fn get(&self, key: &CellKey) -> Option<&CellMetrics> {
        self.cells.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CellKey, &CellMetrics)> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn models(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.cells.keys().map(|k| &k.model).collect();
        set.into_iter().cloned().collect()
    }

    pub fn subjects(&self, model: &str) -> Vec<String> {
        let set: BTreeSet<&String> = self
            .cells
            .keys()
            .filter(|k| k.model == model)
            .map(|k| &k.subject)
            .collect();
        set.into_iter().cloned().collect()
    }

    pub fn horizons(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.cells.keys().map(|k| k.horizon).collect();
        set.into_iter().collect()
    }

    /// `(task, horizon, subject)` coverage of one model.
    pub fn coverage(&self, model: &str) -> BTreeSet<(usize, usize, String)> {
        self.cells
            .keys()
            .filter(|k| k.model == model)
            .map(|k| (k.task, k.horizon, k.subject.clone()))
            .collect()
    }

    /// Unweighted mean of `metric` over the view's cells for one subject.
    pub fn subject_value(
        &self,
        model: &str,
        subject: &str,
        view: View,
        metric: Metric,
    ) -> Option<f64> {
        let values: Vec<f64> = self
            .cells
            .range(
                CellKey {
                    model: model.to_string(),
                    subject: subject.to_string(),
                    task: 0,
                    horizon: 0,
                }..,
            )
            .take_while(|(k, _)| k.model == model && k.subject == subject)
            .filter(|(k, _)| view.contains(k.task, k.horizon))
            .map(|(_, m)| m.get(metric))
            .collect();
        if values.is_empty() {
            None
        } else {
            Some(values.iter().sum::<f64>() / values.len() as f64)
        }
    }

    /// Per-subject view values of one model, in subject order.
    pub fn subject_values(&self, model: &str, view: View, metric: Metric) -> Vec<(String, f64)> {
        self.subjects(model)
            .into_iter()
            .filter_map(|s| {
                let v = self.subject_value(model, &s, view, metric);
                if v.is_none() {
                    warn!("{model}: subject {s} has no cells for {}", view.label());
                }
                v.map(|v| (s, v))
            })
            .collect()
    }

    /// Mean ± std over subjects of the per-subject view value.
    pub fn aggregate(&self, model: &str, view: View, metric: Metric) -> Option<Summary> {
        let values: Vec<f64> = self
            .subject_values(model, view, metric)
            .into_iter()
            .map(|(_, v)| v)
            .collect();
        Summary::of(&values)
    }
}
