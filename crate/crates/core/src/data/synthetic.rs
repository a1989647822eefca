//! Deterministic synthetic vital-sign recordings for tests, benchmarks and
//! smoke runs.
//!
//! Each channel is a subject-specific baseline plus a mean-reverting AR(1)
//! excursion, so predictability decays with the forecast horizon. Pulse
//! tracks HR with small measurement noise; RR carries a slow oscillation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{SubjectRecording, NUM_CHANNELS};
use crate::nn::Tensor;

pub fn synthetic_recording(subject_id: &str, duration: usize, seed: u64) -> SubjectRecording {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let base_hr = rng.gen_range(60.0..110.0);
    let base_spo2 = rng.gen_range(93.0..99.0);
    let base_rr = rng.gen_range(12.0..22.0);
    let rr_period = rng.gen_range(60.0..120.0);
    let rr_phase = rng.gen_range(0.0..std::f64::consts::TAU);

    let (mut hr, mut spo2, mut rr) = (0.0f64, 0.0f64, 0.0f64);
    let mut data = Vec::with_capacity(duration * NUM_CHANNELS);
    for t in 0..duration {
        hr = 0.99 * hr + 0.8 * unit.sample(&mut rng);
        spo2 = 0.98 * spo2 + 0.15 * unit.sample(&mut rng);
        rr = 0.97 * rr + 0.5 * unit.sample(&mut rng);
        let h = base_hr + hr;
        let osc = 2.0 * (std::f64::consts::TAU * t as f64 / rr_period + rr_phase).sin();
        data.push(h);
        data.push((base_spo2 + spo2).min(100.0));
        data.push(h + 0.5 * unit.sample(&mut rng));
        data.push((base_rr + rr + osc).max(4.0));
    }
    SubjectRecording::new(
        subject_id,
        Tensor::from_vec(&[duration, NUM_CHANNELS], data).expect("length matches"),
    )
    .expect("four channels")
}

/// `n` subjects named `01`, `02`, … with seeds derived from `seed`.
pub fn synthetic_corpus(n: usize, duration: usize, seed: u64) -> Vec<SubjectRecording> {
    (0..n)
        .map(|i| {
            synthetic_recording(
                &format!("{:02}", i + 1),
                duration,
                seed.wrapping_mul(1_000_003).wrapping_add(i as u64),
            )
        })
        .collect()
}
