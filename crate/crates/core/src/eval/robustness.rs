use serde::Serialize;

use super::metrics::{evaluate_windows, Metric, View};
use crate::data::{corrupt_windows, CorruptionKind, CorruptionSpec, WindowSample};
use crate::error::{Error, Result};
use crate::model::HybridModelParams;

/// Macro-averaged error of one subject under one corruption setting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessPoint {
    pub kind: CorruptionKind,
    pub level: f64,
    pub model: String,
    pub subject: String,
    pub macro_mae: f64,
    pub macro_rmse: f64,
}

/// Evaluates a trained model on corrupted copies of one subject's test
/// windows, once per spec. Targets are never corrupted.
pub fn robustness_sweep(
    params: &HybridModelParams,
    model: &str,
    subject: &str,
    windows: &[WindowSample],
    specs: &[CorruptionSpec],
) -> Result<Vec<RobustnessPoint>> {
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.validate(true)?;
        let corrupted = corrupt_windows(windows, spec)?;
        let table = evaluate_windows(params, model, subject, &corrupted)?;
        let value = |metric| {
            table
                .subject_value(model, subject, View::Macro, metric)
                .ok_or_else(|| {
                    Error::Evaluation(format!("{model}: no windows for subject {subject}"))
                })
        };
        out.push(RobustnessPoint {
            kind: spec.kind,
            level: spec.level,
            model: model.to_string(),
            subject: subject.to_string(),
            macro_mae: value(Metric::Mae)?,
            macro_rmse: value(Metric::Rmse)?,
        });
    }
    Ok(out)
}
