//! Vital-sign recordings, windowing, leave-one-patient-out folds and
//! test-time corruption.

mod corruption;
mod folds;
mod ingest;
pub mod synthetic;
mod windows;

pub use corruption::{
    corrupt_windows, impute_forward_backward, inject_missing, inject_noise, CorruptionKind,
    CorruptionSpec, MISSING_LEVELS, NOISE_LEVELS,
};
pub use folds::{
    destandardize, make_lopo_folds, prepare_fold, standardize, ChannelStats, FoldData, FoldSpec,
    STD_EPSILON,
};
pub use ingest::{
    ingest_recording, read_manifest, write_recording_csv, IngestionReport, ManifestEntry,
    RejectedSubject, SubjectSummary,
};
pub use windows::{build_windows, window_count, WindowSample};

use crate::nn::Tensor;

/// Channel order used everywhere: columns of every series, window and
/// target matrix.
pub const CHANNELS: [&str; NUM_CHANNELS] = ["HR", "SpO2", "Pulse", "RR"];
pub const NUM_CHANNELS: usize = 4;

/// One subject's 1 Hz numerics, `T × 4` in [`CHANNELS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectRecording {
    pub subject_id: String,
    pub series: Tensor,
    /// Raw entries that were blank or non-numeric and got imputed, per channel.
    pub imputed: [usize; NUM_CHANNELS],
}

impl SubjectRecording {
    pub fn new(subject_id: impl Into<String>, series: Tensor) -> crate::Result<Self> {
        if series.shape().len() != 2 || series.cols() != NUM_CHANNELS {
            return Err(crate::Error::Shape(format!(
                "recording must be T x {NUM_CHANNELS}, got {:?}",
                series.shape()
            )));
        }
        Ok(Self {
            subject_id: subject_id.into(),
            series,
            imputed: [0; NUM_CHANNELS],
        })
    }

    /// Duration in seconds.
    pub fn duration(&self) -> usize {
        self.series.rows()
    }
}
