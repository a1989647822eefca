//! Forward and reverse passes through encoder → projection → circuit →
//! heads.

use super::params::{Encoder, HybridModelParams};
use crate::data::NUM_CHANNELS;
use crate::error::{Error, Result};
use crate::nn::{
    gru_backward, gru_forward, linear_backward, linear_forward, lstm_backward, lstm_forward,
    mse_loss, GruCache, LstmCache, Tensor,
};
use crate::quantum::{circuit_vjp, run_circuit};

#[derive(Debug, Clone)]
enum EncoderCache {
    Gru(GruCache),
    Lstm(LstmCache),
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    encoder: EncoderCache,
    /// Latent state `z`.
    pub latent: Vec<f64>,
    /// Embedding angles `θ = W_q z + b_q` (hybrid only).
    pub angles: Option<Vec<f64>>,
    /// Pauli-Z readout `q` (hybrid only).
    pub readout: Option<Vec<f64>>,
    /// Head input `[z ‖ q]`, or `z` without the circuit.
    pub features: Vec<f64>,
}

pub fn forward_with_cache(
    params: &HybridModelParams,
    window: &Tensor,
) -> Result<(Tensor, ForwardCache)> {
    if window.shape().len() != 2 || window.cols() != NUM_CHANNELS {
        return Err(Error::shape(format!(
            "model input must be L x {NUM_CHANNELS}, got {:?}",
            window.shape()
        )));
    }
    let (latent, encoder) = match &params.encoder {
        Encoder::Gru(p) => {
            let (h, c) = gru_forward(p, window)?;
            (h, EncoderCache::Gru(c))
        }
        Encoder::Lstm(p) => {
            let (h, c) = lstm_forward(p, window)?;
            (h, EncoderCache::Lstm(c))
        }
    };

    let mut features = latent.clone();
    let (angles, readout) = match (&params.projection, &params.quantum) {
        (Some(projection), Some(quantum)) => {
            let theta = linear_forward(projection, &latent)?;
            let (_, q) = run_circuit(&quantum.circuit(theta.clone()))?;
            features.extend_from_slice(&q.expectations);
            (Some(theta), Some(q.expectations))
        }
        _ => (None, None),
    };

    let mut pred = Tensor::zeros(&[params.heads.len(), NUM_CHANNELS]);
    for (k, head) in params.heads.iter().enumerate() {
        pred.row_mut(k)
            .copy_from_slice(&linear_forward(head, &features)?);
    }
    if !pred.is_finite() {
        return Err(Error::Training("non-finite prediction".into()));
    }
    Ok((
        pred,
        ForwardCache {
            encoder,
            latent,
            angles,
            readout,
            features,
        },
    ))
}

/// `horizons × 4` prediction for one standardized window.
pub fn forward(params: &HybridModelParams, window: &Tensor) -> Result<Tensor> {
    forward_with_cache(params, window).map(|(p, _)| p)
}

/// Forward over many windows; each sample is independent.
pub fn predict_batch(params: &HybridModelParams, windows: &[&Tensor]) -> Result<Vec<Tensor>> {
    windows.iter().map(|w| forward(params, w)).collect()
}

/// Accumulates parameter gradients of `⟨grad_pred, ŷ⟩` into `grads`.
pub fn backward_from_cache(
    params: &HybridModelParams,
    cache: &ForwardCache,
    grad_pred: &Tensor,
    grads: &mut HybridModelParams,
) -> Result<()> {
    grad_pred.expect_shape(&[params.heads.len(), NUM_CHANNELS])?;
    if !grad_pred.is_finite() {
        return Err(Error::Training("non-finite loss gradient".into()));
    }
    let mut grad_features = vec![0.0; cache.features.len()];
    for (k, (head, head_grads)) in params.heads.iter().zip(&mut grads.heads).enumerate() {
        let g = linear_backward(head, &cache.features, grad_pred.row(k), head_grads)?;
        for (a, b) in grad_features.iter_mut().zip(g) {
            *a += b;
        }
    }

    let d_z = cache.latent.len();
    let mut grad_latent = grad_features[..d_z].to_vec();
    if let (Some(projection), Some(quantum), Some(theta)) =
        (&params.projection, &params.quantum, &cache.angles)
    {
        let grad_readout = &grad_features[d_z..];
        let vjp = circuit_vjp(&quantum.circuit(theta.clone()), grad_readout)?;
        let q_grads = grads
            .quantum
            .as_mut()
            .ok_or_else(|| Error::shape("gradient accumulator lacks the quantum layer"))?;
        for (a, b) in q_grads.omega.data_mut().iter_mut().zip(&vjp.omega) {
            *a += b;
        }
        let p_grads = grads
            .projection
            .as_mut()
            .ok_or_else(|| Error::shape("gradient accumulator lacks the projection"))?;
        let g = linear_backward(projection, &cache.latent, &vjp.theta, p_grads)?;
        for (a, b) in grad_latent.iter_mut().zip(g) {
            *a += b;
        }
    }

    match (&params.encoder, &cache.encoder, &mut grads.encoder) {
        (Encoder::Gru(p), EncoderCache::Gru(c), Encoder::Gru(g)) => {
            gru_backward(p, c, &grad_latent, g)?;
        }
        (Encoder::Lstm(p), EncoderCache::Lstm(c), Encoder::Lstm(g)) => {
            lstm_backward(p, c, &grad_latent, g)?;
        }
        _ => {
            return Err(Error::Training(
                "encoder cache does not match parameters".into(),
            ))
        }
    }
    Ok(())
}

/// MSE of one sample scaled by `weight`, with its gradient accumulated into
/// `grads`. Returns the unscaled loss.
pub fn sample_loss_and_grad(
    params: &HybridModelParams,
    window: &Tensor,
    target: &Tensor,
    weight: f64,
    grads: &mut HybridModelParams,
) -> Result<f64> {
    let (pred, cache) = forward_with_cache(params, window)?;
    target.expect_shape(pred.shape())?;
    let (loss, grad) = mse_loss(pred.data(), target.data())?;
    if !loss.is_finite() {
        return Err(Error::Training("non-finite loss".into()));
    }
    let mut grad_pred = Tensor::from_vec(pred.shape(), grad)?;
    grad_pred.scale(weight);
    backward_from_cache(params, &cache, &grad_pred, grads)?;
    Ok(loss)
}

/// Loss and full parameter gradient for one `(window, target)` pair.
pub fn backward(
    params: &HybridModelParams,
    window: &Tensor,
    target: &Tensor,
) -> Result<(f64, HybridModelParams)> {
    let mut grads = params.zeros_like();
    let loss = sample_loss_and_grad(params, window, target, 1.0, &mut grads)?;
    Ok((loss, grads))
}
