use log::warn;

use super::{SubjectRecording, NUM_CHANNELS};
use crate::nn::Tensor;

/// History window and multi-horizon targets anchored at one second.
///
/// `anchor` is the 0-based row index of the last observed second, so the
/// input covers rows `anchor + 1 - L ..= anchor` and target row `k` is the
/// series value at `anchor + horizons[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSample {
    pub subject_id: String,
    pub anchor: usize,
    /// `L × 4`
    pub input: Tensor,
    /// `horizons × 4`
    pub targets: Tensor,
}

/// Number of windows a recording of length `duration` yields at stride 1.
pub fn window_count(duration: usize, window: usize, max_horizon: usize) -> usize {
    (duration + 1).saturating_sub(window + max_horizon)
}

/// Slides a window over the recording with the given stride.
///
/// Recordings shorter than `window + max(horizons)` produce no windows.
pub fn build_windows(
    rec: &SubjectRecording,
    window: usize,
    horizons: &[usize],
    stride: usize,
) -> Vec<WindowSample> {
    let max_h = horizons.iter().copied().max().unwrap_or(0);
    let t = rec.duration();
    if window == 0 || stride == 0 || t < window + max_h {
        warn!(
            "subject {}: {t} s is too short for a {window} s window and {max_h} s horizon",
            rec.subject_id
        );
        return Vec::new();
    }
    let series = &rec.series;
    let first = window - 1;
    let last = t - 1 - max_h;
    (first..=last)
        .step_by(stride)
        .map(|anchor| {
            let start = anchor + 1 - window;
            let input = Tensor::from_vec(
                &[window, NUM_CHANNELS],
                series.data()[start * NUM_CHANNELS..(anchor + 1) * NUM_CHANNELS].to_vec(),
            )
            .expect("window slice matches its shape");
            let targets = Tensor::from_vec(
                &[horizons.len(), NUM_CHANNELS],
                horizons
                    .iter()
                    .flat_map(|h| series.row(anchor + h).iter().copied())
                    .collect(),
            )
            .expect("target rows match their shape");
            WindowSample {
                subject_id: rec.subject_id.clone(),
                anchor,
                input,
                targets,
            }
        })
        .collect()
}
