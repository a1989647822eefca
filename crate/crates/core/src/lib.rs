//! Hybrid quantum-classical forecasting of multivariate vital signs.
//!
//! A GRU encoder summarizes a window of 1 Hz monitor numerics (HR, SpO₂,
//! pulse, respiration rate). Its latent state is projected to rotation angles
//! of a small variational quantum circuit, simulated exactly on a statevector.
//! The Pauli-Z readout of the circuit is concatenated with the latent state and
//! fed to one linear head per forecast horizon.
//!
//! The crate is organised as:
//!
//! * [`quantum`]: statevector simulation, circuit readout and exact gradients.
//! * [`nn`]: tensors, linear/GRU/LSTM layers with hand-written backward passes,
//!   Adam, MSE and the checkpoint container.
//! * [`model`]: the forecaster variants and the training loop.
//! * [`data`]: CSV ingestion, sliding windows, leave-one-patient-out folds,
//!   standardization and test-time corruption.
//! * [`eval`]: error metrics, aggregation views, AvgWins, patient-wise ranking
//!   and robustness sweeps.

pub mod data;
pub mod error;
pub mod eval;
pub mod model;
pub mod nn;
pub mod quantum;

pub use error::{Error, Result};

pub use data::{
    CorruptionKind, CorruptionSpec, FoldSpec, SubjectRecording, WindowSample, CHANNELS,
    NUM_CHANNELS,
};
pub use eval::{MetricTable, RankingResult};
pub use model::{HybridModelParams, ModelConfig, Variant};
pub use nn::{AdamState, GruParams, LinearParams, LstmParams, Tensor};
pub use quantum::{CircuitParams, QuantumReadout, Statevector};
