//! The hybrid forecaster, its classical ablations, and training.

mod config;
mod network;
mod params;
mod train;

pub use config::{ModelConfig, Variant};
pub use network::{
    backward, backward_from_cache, forward, forward_with_cache, predict_batch,
    sample_loss_and_grad, ForwardCache,
};
pub use params::{Encoder, HybridModelParams, QuantumLayer};
pub use train::{train_fold, EpochStats, TrainOutcome};
