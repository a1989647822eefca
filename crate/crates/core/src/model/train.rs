use log::debug;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ModelConfig;
use super::network::{forward, sample_loss_and_grad};
use super::params::HybridModelParams;
use crate::data::WindowSample;
use crate::error::{Error, Result};
use crate::nn::{mse_loss, AdamConfig, AdamState};

/// Samples per gradient work unit. Fixed so the floating-point reduction
/// order, and therefore the result, does not depend on the thread count.
const GRAD_CHUNK: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStats {
    /// 1-based.
    pub epoch: usize,
    /// Mean per-sample MSE over the epoch's mini-batches.
    pub train_loss: f64,
    pub val_loss: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: HybridModelParams,
    pub trace: Vec<EpochStats>,
}

fn batch_gradient(
    params: &HybridModelParams,
    samples: &[&WindowSample],
) -> Result<(f64, HybridModelParams)> {
    let weight = 1.0 / samples.len() as f64;
    let partials: Vec<Result<(f64, HybridModelParams)>> = samples
        .par_chunks(GRAD_CHUNK)
        .map(|chunk| {
            let mut grads = params.zeros_like();
            let mut loss = 0.0;
            for s in chunk {
                loss += sample_loss_and_grad(params, &s.input, &s.targets, weight, &mut grads)?;
            }
            Ok((loss, grads))
        })
        .collect();
    let mut total = params.zeros_like();
    let mut loss = 0.0;
    for part in partials {
        let (l, g) = part?;
        loss += l;
        total.accumulate(&g)?;
    }
    Ok((loss, total))
}

/// Mean per-sample MSE of `params` on `samples`.
pub fn evaluate_loss(params: &HybridModelParams, samples: &[WindowSample]) -> Result<f64> {
    let losses: Vec<Result<f64>> = samples
        .par_iter()
        .map(|s| {
            let pred = forward(params, &s.input)?;
            Ok(mse_loss(pred.data(), s.targets.data())?.0)
        })
        .collect();
    let mut sum = 0.0;
    for l in losses {
        sum += l?;
    }
    Ok(sum / samples.len() as f64)
}

/// Shuffled mini-batch Adam on per-sample MSE for `config.epochs` epochs.
///
/// Initialisation and shuffling are driven by `config.seed` alone, so two
/// calls with the same inputs return bit-identical parameters and traces.
/// `val` is only scored, never used for selection.
pub fn train_fold(
    config: &ModelConfig,
    train: &[WindowSample],
    val: &[WindowSample],
) -> Result<TrainOutcome> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Config("empty training set".into()));
    }
    let mut init_rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(1);

    let mut params = HybridModelParams::init(config, &mut init_rng)?;
    let mut adam = AdamState::new(
        AdamConfig {
            learning_rate: config.learning_rate,
            ..AdamConfig::default()
        },
        &params,
    )?;

    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut trace = Vec::with_capacity(config.epochs);
    for epoch in 1..=config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let samples: Vec<&WindowSample> = batch.iter().map(|&i| &train[i]).collect();
            let (loss, grads) = batch_gradient(&params, &samples)?;
            if !loss.is_finite() {
                return Err(Error::Training(format!("non-finite loss in epoch {epoch}")));
            }
            adam.step(&mut params, &grads)?;
            epoch_loss += loss;
        }
        let train_loss = epoch_loss / train.len() as f64;
        let val_loss = if val.is_empty() {
            None
        } else {
            Some(evaluate_loss(&params, val)?)
        };
        debug!("epoch {epoch}: train {train_loss:.6} val {val_loss:?}");
        trace.push(EpochStats {
            epoch,
            train_loss,
            val_loss,
        });
    }
    Ok(TrainOutcome { params, trace })
}
