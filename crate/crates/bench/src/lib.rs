//! Fixtures shared by the benchmarks: default-sized models and inputs.

use hqf_core::model::{HybridModelParams, ModelConfig, Variant};
use hqf_core::quantum::CircuitParams;
use hqf_core::Tensor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_circuit(n_qubits: usize, depth: usize, seed: u64) -> CircuitParams {
    let mut r = rng(seed);
    let mut angles = |n: usize| (0..n).map(|_| r.gen_range(-3.0..3.0)).collect::<Vec<f64>>();
    let theta = angles(n_qubits);
    let omega = angles(depth * n_qubits * 3);
    CircuitParams::new(theta, omega, depth, true).expect("valid circuit")
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Tensor {
    let mut r = rng(seed);
    Tensor::from_vec(
        &[rows, cols],
        (0..rows * cols).map(|_| r.gen_range(-1.0..1.0)).collect(),
    )
    .expect("sizes match")
}

/// Default architecture (n_q=6, D=3, d_z=56, L=240) for `variant`.
pub fn default_model(variant: Variant, seed: u64) -> (ModelConfig, HybridModelParams) {
    let config = ModelConfig {
        variant,
        ..ModelConfig::default()
    };
    let params = HybridModelParams::init(&config, &mut rng(seed)).expect("default config is valid");
    (config, params)
}
