//! Error metrics and the summary views built on them.
//!
//! Everything here works on a [`MetricTable`] of per-(model, subject, task,
//! horizon) MAE/RMSE in standardized units. Aggregation always goes
//! cell → per-subject view value → unweighted mean (and sample standard
//! deviation) over subjects.

mod metrics;
mod ranking;
pub mod report;
mod robustness;
mod wins;

pub use metrics::{
    compute_errors, evaluate_windows, CellKey, CellMetrics, Metric, MetricTable, Summary, View,
};
pub use ranking::{patient_rank_scores, RankView, RankingResult};
pub use robustness::{robustness_sweep, RobustnessPoint};
pub use wins::avg_wins;
