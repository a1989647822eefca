//! Single-layer GRU.
//!
//! Gate layout along the `3H` axis is `[reset, update, candidate]`:
//!
//! ```text
//! r  = σ(W_ir x + b_ir + W_hr h + b_hr)
//! u  = σ(W_iu x + b_iu + W_hu h + b_hu)
//! n  = tanh(W_in x + b_in + r ⊙ (W_hn h + b_hn))
//! h' = (1 - u) ⊙ n + u ⊙ h
//! ```

use rand::Rng;

use super::{init, matvec_add, outer_backward, sigmoid, ParamSet, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub input_size: usize,
    pub hidden_size: usize,
    /// `3H × input_size`
    pub w_input: Tensor,
    /// `3H × H`
    pub w_hidden: Tensor,
    pub b_input: Tensor,
    pub b_hidden: Tensor,
}

impl GruParams {
    pub fn zeros(input_size: usize, hidden_size: usize) -> Self {
        let g = 3 * hidden_size;
        Self {
            input_size,
            hidden_size,
            w_input: Tensor::zeros(&[g, input_size]),
            w_hidden: Tensor::zeros(&[g, hidden_size]),
            b_input: Tensor::zeros(&[g]),
            b_hidden: Tensor::zeros(&[g]),
        }
    }

    pub fn init<R: Rng>(input_size: usize, hidden_size: usize, rng: &mut R) -> Self {
        let g = 3 * hidden_size;
        Self {
            input_size,
            hidden_size,
            w_input: init::uniform_fan_in(&[g, input_size], input_size, rng),
            w_hidden: init::uniform_fan_in(&[g, hidden_size], hidden_size, rng),
            b_input: Tensor::zeros(&[g]),
            b_hidden: Tensor::zeros(&[g]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let g = 3 * self.hidden_size;
        self.w_input.expect_shape(&[g, self.input_size])?;
        self.w_hidden.expect_shape(&[g, self.hidden_size])?;
        self.b_input.expect_shape(&[g])?;
        self.b_hidden.expect_shape(&[g])
    }
}

impl ParamSet for GruParams {
    fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        vec![
            ("w_input".to_string(), &self.w_input),
            ("w_hidden".to_string(), &self.w_hidden),
            ("b_input".to_string(), &self.b_input),
            ("b_hidden".to_string(), &self.b_hidden),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![
            &mut self.w_input,
            &mut self.w_hidden,
            &mut self.b_input,
            &mut self.b_hidden,
        ]
    }
}

/// Activations saved by [`gru_forward`], one `H`-block per time step.
#[derive(Debug, Clone)]
pub struct GruCache {
    input_size: usize,
    hidden_size: usize,
    window: Tensor,
    h_prev: Vec<f64>,
    reset: Vec<f64>,
    update: Vec<f64>,
    candidate: Vec<f64>,
    hidden_lin: Vec<f64>,
}

impl GruCache {
    pub fn steps(&self) -> usize {
        self.window.rows()
    }
}

pub(crate) fn check_recurrent_window(window: &Tensor, input_size: usize) -> Result<()> {
    if window.shape().len() != 2 || window.cols() != input_size || window.rows() == 0 {
        return Err(Error::shape(format!(
            "recurrent window must be L x {input_size} with L >= 1, got {:?}",
            window.shape()
        )));
    }
    if !window.is_finite() {
        return Err(Error::shape("recurrent window contains non-finite values"));
    }
    Ok(())
}

/// Runs the recurrence from a zero hidden state and returns the final hidden
/// state.
pub fn gru_forward(params: &GruParams, window: &Tensor) -> Result<(Vec<f64>, GruCache)> {
    params.validate()?;
    check_recurrent_window(window, params.input_size)?;
    let h_size = params.hidden_size;
    let steps = window.rows();
    let mut cache = GruCache {
        input_size: params.input_size,
        hidden_size: h_size,
        window: window.clone(),
        h_prev: Vec::with_capacity(steps * h_size),
        reset: Vec::with_capacity(steps * h_size),
        update: Vec::with_capacity(steps * h_size),
        candidate: Vec::with_capacity(steps * h_size),
        hidden_lin: Vec::with_capacity(steps * h_size),
    };

    let mut h = vec![0.0; h_size];
    let mut gi = vec![0.0; 3 * h_size];
    let mut gh = vec![0.0; 3 * h_size];
    for t in 0..steps {
        let x = window.row(t);
        gi.copy_from_slice(params.b_input.data());
        matvec_add(params.w_input.data(), params.input_size, 0, x, &mut gi);
        gh.copy_from_slice(params.b_hidden.data());
        matvec_add(params.w_hidden.data(), h_size, 0, &h, &mut gh);

        cache.h_prev.extend_from_slice(&h);
        for k in 0..h_size {
            let r = sigmoid(gi[k] + gh[k]);
            let u = sigmoid(gi[h_size + k] + gh[h_size + k]);
            let hn = gh[2 * h_size + k];
            let n = (gi[2 * h_size + k] + r * hn).tanh();
            cache.reset.push(r);
            cache.update.push(u);
            cache.candidate.push(n);
            cache.hidden_lin.push(hn);
            h[k] = (1.0 - u) * n + u * h[k];
        }
    }
    Ok((h, cache))
}

/// Reverse-mode pass for `⟨grad_hidden, h_L⟩`. Accumulates parameter
/// gradients into `grads` and returns the gradient w.r.t. the window.
pub fn gru_backward(
    params: &GruParams,
    cache: &GruCache,
    grad_hidden: &[f64],
    grads: &mut GruParams,
) -> Result<Tensor> {
    let h_size = params.hidden_size;
    if cache.hidden_size != h_size || cache.input_size != params.input_size {
        return Err(Error::Training(format!(
            "GRU cache built for {}->{} used with a {}->{} layer",
            cache.input_size, cache.hidden_size, params.input_size, h_size
        )));
    }
    if grad_hidden.len() != h_size {
        return Err(Error::shape(format!(
            "GRU upstream gradient has {} entries, hidden size is {h_size}",
            grad_hidden.len()
        )));
    }
    grads.validate()?;

    let steps = cache.steps();
    let mut grad_window = Tensor::zeros(cache.window.shape());
    let mut dh = grad_hidden.to_vec();
    let mut da_in = vec![0.0; 3 * h_size];
    let mut da_hid = vec![0.0; 3 * h_size];
    for t in (0..steps).rev() {
        let span = t * h_size..(t + 1) * h_size;
        let h_prev = &cache.h_prev[span.clone()];
        let r = &cache.reset[span.clone()];
        let u = &cache.update[span.clone()];
        let n = &cache.candidate[span.clone()];
        let hn = &cache.hidden_lin[span];

        let mut dh_prev = vec![0.0; h_size];
        for k in 0..h_size {
            let dn = dh[k] * (1.0 - u[k]);
            let du = dh[k] * (h_prev[k] - n[k]);
            dh_prev[k] = dh[k] * u[k];
            let dan = dn * (1.0 - n[k] * n[k]);
            let dr = dan * hn[k];
            let dar = dr * r[k] * (1.0 - r[k]);
            let dau = du * u[k] * (1.0 - u[k]);
            da_in[k] = dar;
            da_in[h_size + k] = dau;
            da_in[2 * h_size + k] = dan;
            da_hid[k] = dar;
            da_hid[h_size + k] = dau;
            da_hid[2 * h_size + k] = dan * r[k];
        }

        outer_backward(
            params.w_input.data(),
            params.input_size,
            &da_in,
            cache.window.row(t),
            grads.w_input.data_mut(),
            Some(grad_window.row_mut(t)),
        );
        for (b, g) in grads.b_input.data_mut().iter_mut().zip(&da_in) {
            *b += g;
        }
        outer_backward(
            params.w_hidden.data(),
            h_size,
            &da_hid,
            h_prev,
            grads.w_hidden.data_mut(),
            Some(&mut dh_prev),
        );
        for (b, g) in grads.b_hidden.data_mut().iter_mut().zip(&da_hid) {
            *b += g;
        }
        dh = dh_prev;
    }
    Ok(grad_window)
}
