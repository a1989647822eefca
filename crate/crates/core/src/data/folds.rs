//! Leave-one-patient-out folds and per-fold standardization.

use std::collections::HashSet;

use log::warn;

use super::windows::build_windows;
use super::{SubjectRecording, WindowSample, NUM_CHANNELS};
use crate::error::{Error, Result};
use crate::nn::Tensor;

/// Floor applied to a channel's standard deviation.
pub const STD_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub mean: [f64; NUM_CHANNELS],
    pub std: [f64; NUM_CHANNELS],
}

impl ChannelStats {
    /// Population mean and standard deviation of every channel over all
    /// rows of the given recordings, summed in the order given.
    pub fn from_recordings<'a>(
        recordings: impl IntoIterator<Item = &'a SubjectRecording> + Clone,
    ) -> Result<Self> {
        let mut count = 0usize;
        let mut sum = [0.0; NUM_CHANNELS];
        for rec in recordings.clone() {
            for t in 0..rec.duration() {
                for (s, v) in sum.iter_mut().zip(rec.series.row(t)) {
                    *s += v;
                }
            }
            count += rec.duration();
        }
        if count == 0 {
            return Err(Error::Config(
                "no training samples for channel statistics".into(),
            ));
        }
        let mean = sum.map(|s| s / count as f64);
        let mut sq = [0.0; NUM_CHANNELS];
        for rec in recordings {
            for t in 0..rec.duration() {
                for ((s, v), m) in sq.iter_mut().zip(rec.series.row(t)).zip(&mean) {
                    *s += (v - m) * (v - m);
                }
            }
        }
        let std = sq.map(|s| (s / count as f64).sqrt());
        for (c, s) in std.iter().enumerate() {
            if *s < STD_EPSILON {
                warn!(
                    "channel {} is constant on the training subjects",
                    super::CHANNELS[c]
                );
            }
        }
        Ok(Self { mean, std })
    }

    fn scale(&self, c: usize) -> f64 {
        self.std[c].max(STD_EPSILON)
    }

    pub fn standardize_matrix(&self, m: &Tensor) -> Tensor {
        let mut out = m.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = (*v - self.mean[c]) / self.scale(c);
            }
        }
        out
    }

    pub fn destandardize_matrix(&self, m: &Tensor) -> Tensor {
        let mut out = m.clone();
        for r in 0..out.rows() {
            for (c, v) in out.row_mut(r).iter_mut().enumerate() {
                *v = *v * self.scale(c) + self.mean[c];
            }
        }
        out
    }
}

/// Applies `(x - mean) / std` per channel to both inputs and targets.
pub fn standardize(sample: &WindowSample, stats: &ChannelStats) -> WindowSample {
    WindowSample {
        subject_id: sample.subject_id.clone(),
        anchor: sample.anchor,
        input: stats.standardize_matrix(&sample.input),
        targets: stats.standardize_matrix(&sample.targets),
    }
}

/// Maps a standardized `horizons × 4` prediction back to raw units.
pub fn destandardize(pred: &Tensor, stats: &ChannelStats) -> Tensor {
    stats.destandardize_matrix(pred)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldSpec {
    /// 1-based.
    pub index: usize,
    pub test_subject: String,
    pub train_subjects: Vec<String>,
    pub stats: ChannelStats,
}

/// One fold per subject, in input order; fold `k` holds out subject `k`.
pub fn make_lopo_folds(recordings: &[SubjectRecording]) -> Result<Vec<FoldSpec>> {
    let mut seen = HashSet::new();
    for rec in recordings {
        if !seen.insert(rec.subject_id.as_str()) {
            return Err(Error::Config(format!(
                "duplicate subject id {}",
                rec.subject_id
            )));
        }
    }
    if recordings.len() < 2 {
        return Err(Error::Config(format!(
            "leave-one-patient-out needs at least 2 subjects, got {}",
            recordings.len()
        )));
    }
    recordings
        .iter()
        .enumerate()
        .map(|(k, test)| {
            let train: Vec<&SubjectRecording> = recordings
                .iter()
                .filter(|r| r.subject_id != test.subject_id)
                .collect();
            Ok(FoldSpec {
                index: k + 1,
                test_subject: test.subject_id.clone(),
                train_subjects: train.iter().map(|r| r.subject_id.clone()).collect(),
                stats: ChannelStats::from_recordings(train.iter().copied())?,
            })
        })
        .collect()
}

/// Standardized windows of one fold.
#[derive(Debug, Clone)]
pub struct FoldData {
    pub train: Vec<WindowSample>,
    /// The last `val_fraction` of each training subject's windows, by time.
    pub val: Vec<WindowSample>,
    pub test: Vec<WindowSample>,
}

pub fn prepare_fold(
    fold: &FoldSpec,
    recordings: &[SubjectRecording],
    window: usize,
    horizons: &[usize],
    stride: usize,
    val_fraction: f64,
) -> Result<FoldData> {
    if !(0.0..1.0).contains(&val_fraction) {
        return Err(Error::Config(format!(
            "val_fraction must be in [0, 1), got {val_fraction}"
        )));
    }
    let mut data = FoldData {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for rec in recordings {
        let windows: Vec<WindowSample> = build_windows(rec, window, horizons, stride)
            .iter()
            .map(|w| standardize(w, &fold.stats))
            .collect();
        if rec.subject_id == fold.test_subject {
            data.test = windows;
        } else if fold.train_subjects.contains(&rec.subject_id) {
            let n_val = (windows.len() as f64 * val_fraction).floor() as usize;
            let split = windows.len() - n_val;
            let mut windows = windows;
            data.val.extend(windows.drain(split..));
            data.train.extend(windows);
        }
    }
    Ok(data)
}
