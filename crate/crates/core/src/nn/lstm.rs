//! Single-layer LSTM used by the classical baseline.
//!
//! Gate layout along the `4H` axis is `[input, forget, cell, output]`:
//!
//! ```text
//! i = σ(·)   f = σ(·)   g = tanh(·)   o = σ(·)
//! c' = f ⊙ c + i ⊙ g
//! h' = o ⊙ tanh(c')
//! ```

use rand::Rng;

use super::gru::check_recurrent_window;
use super::{init, matvec_add, outer_backward, sigmoid, ParamSet, Tensor};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub input_size: usize,
    pub hidden_size: usize,
    /// `4H × input_size`
    pub w_input: Tensor,
    /// `4H × H`
    pub w_hidden: Tensor,
    pub b_input: Tensor,
    pub b_hidden: Tensor,
}

impl LstmParams {
    pub fn zeros(input_size: usize, hidden_size: usize) -> Self {
        let g = 4 * hidden_size;
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
        let g = 4 * hidden_size;
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
        let g = 4 * self.hidden_size;
        self.w_input.expect_shape(&[g, self.input_size])?;
        self.w_hidden.expect_shape(&[g, self.hidden_size])?;
        self.b_input.expect_shape(&[g])?;
        self.b_hidden.expect_shape(&[g])
    }
}

impl ParamSet for LstmParams {
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

#[derive(Debug, Clone)]
pub struct LstmCache {
    input_size: usize,
    hidden_size: usize,
    window: Tensor,
    h_prev: Vec<f64>,
    c_prev: Vec<f64>,
    /// Post-activation gates, `4H` per step.
    gates: Vec<f64>,
    /// `tanh(c')`, `H` per step.
    cell_tanh: Vec<f64>,
    final_cell: Vec<f64>,
}

impl LstmCache {
    pub fn steps(&self) -> usize {
        self.window.rows()
    }

    pub fn final_cell(&self) -> &[f64] {
        &self.final_cell
    }
}

pub fn lstm_forward(params: &LstmParams, window: &Tensor) -> Result<(Vec<f64>, LstmCache)> {
    params.validate()?;
    check_recurrent_window(window, params.input_size)?;
    let hs = params.hidden_size;
    let steps = window.rows();
    let mut cache = LstmCache {
        input_size: params.input_size,
        hidden_size: hs,
        window: window.clone(),
        h_prev: Vec::with_capacity(steps * hs),
        c_prev: Vec::with_capacity(steps * hs),
        gates: Vec::with_capacity(steps * 4 * hs),
        cell_tanh: Vec::with_capacity(steps * hs),
        final_cell: Vec::new(),
    };
    let mut h = vec![0.0; hs];
    let mut c = vec![0.0; hs];
    let mut pre = vec![0.0; 4 * hs];
    for t in 0..steps {
        pre.copy_from_slice(params.b_input.data());
        for (p, b) in pre.iter_mut().zip(params.b_hidden.data()) {
            *p += b;
        }
        matvec_add(
            params.w_input.data(),
            params.input_size,
            0,
            window.row(t),
            &mut pre,
        );
        matvec_add(params.w_hidden.data(), hs, 0, &h, &mut pre);

        cache.h_prev.extend_from_slice(&h);
        cache.c_prev.extend_from_slice(&c);
        let base = cache.gates.len();
        cache.gates.resize(base + 4 * hs, 0.0);
        let gates = &mut cache.gates[base..];
        for k in 0..hs {
            let i = sigmoid(pre[k]);
            let f = sigmoid(pre[hs + k]);
            let g = pre[2 * hs + k].tanh();
            let o = sigmoid(pre[3 * hs + k]);
            gates[k] = i;
            gates[hs + k] = f;
            gates[2 * hs + k] = g;
            gates[3 * hs + k] = o;
            c[k] = f * c[k] + i * g;
            let tc = c[k].tanh();
            cache.cell_tanh.push(tc);
            h[k] = o * tc;
        }
    }
    cache.final_cell = c;
    Ok((h, cache))
}

/// Reverse-mode pass for `⟨grad_hidden, h_L⟩`.
pub fn lstm_backward(
    params: &LstmParams,
    cache: &LstmCache,
    grad_hidden: &[f64],
    grads: &mut LstmParams,
) -> Result<Tensor> {
    let hs = params.hidden_size;
    if cache.hidden_size != hs || cache.input_size != params.input_size {
        return Err(Error::Training(format!(
            "LSTM cache built for {}->{} used with a {}->{} layer",
            cache.input_size, cache.hidden_size, params.input_size, hs
        )));
    }
    if grad_hidden.len() != hs {
        return Err(Error::shape(format!(
            "LSTM upstream gradient has {} entries, hidden size is {hs}",
            grad_hidden.len()
        )));
    }
    grads.validate()?;

    let mut grad_window = Tensor::zeros(cache.window.shape());
    let mut dh = grad_hidden.to_vec();
    let mut dc = vec![0.0; hs];
    let mut da = vec![0.0; 4 * hs];
    for t in (0..cache.steps()).rev() {
        let span = t * hs..(t + 1) * hs;
        let gates = &cache.gates[t * 4 * hs..(t + 1) * 4 * hs];
        let c_prev = &cache.c_prev[span.clone()];
        let tc = &cache.cell_tanh[span.clone()];
        let h_prev = &cache.h_prev[span];
        for k in 0..hs {
            let (i, f, g, o) = (
                gates[k],
                gates[hs + k],
                gates[2 * hs + k],
                gates[3 * hs + k],
            );
            let d_o = dh[k] * tc[k];
            let dct = dc[k] + dh[k] * o * (1.0 - tc[k] * tc[k]);
            da[k] = dct * g * i * (1.0 - i);
            da[hs + k] = dct * c_prev[k] * f * (1.0 - f);
            da[2 * hs + k] = dct * i * (1.0 - g * g);
            da[3 * hs + k] = d_o * o * (1.0 - o);
            dc[k] = dct * f;
        }
        outer_backward(
            params.w_input.data(),
            params.input_size,
            &da,
            cache.window.row(t),
            grads.w_input.data_mut(),
            Some(grad_window.row_mut(t)),
        );
        let mut dh_prev = vec![0.0; hs];
        outer_backward(
            params.w_hidden.data(),
            hs,
            &da,
            h_prev,
            grads.w_hidden.data_mut(),
            Some(&mut dh_prev),
        );
        for ((bi, bh), g) in grads
            .b_input
            .data_mut()
            .iter_mut()
            .zip(grads.b_hidden.data_mut().iter_mut())
            .zip(&da)
        {
            *bi += g;
            *bh += g;
        }
        dh = dh_prev;
    }
    Ok(grad_window)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn zero_weights_and_input() {
        let p = LstmParams::zeros(4, 5);
        let (h, cache) = lstm_forward(&p, &Tensor::zeros(&[6, 4])).unwrap();
        assert!(h.iter().all(|v| *v == 0.0));
        assert!(cache.final_cell().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn one_step_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut p = LstmParams::init(2, 3, &mut rng);
        p.b_input = init::uniform(&[12], -0.5, 0.5, &mut rng);
        p.b_hidden = init::uniform(&[12], -0.5, 0.5, &mut rng);
        let x = [1.2, -0.6];
        let (h, cache) = lstm_forward(&p, &Tensor::from_vec(&[1, 2], x.to_vec()).unwrap()).unwrap();
        let s = |v: f64| 1.0 / (1.0 + (-v).exp());
        for k in 0..3 {
            let pre = |gate: usize| {
                let row = gate * 3 + k;
                p.w_input.get2(row, 0) * x[0]
                    + p.w_input.get2(row, 1) * x[1]
                    + p.b_input.data()[row]
                    + p.b_hidden.data()[row]
            };
            let c = s(pre(0)) * pre(2).tanh();
            assert_abs_diff_eq!(cache.final_cell()[k], c, epsilon = 1e-15);
            assert_abs_diff_eq!(h[k], s(pre(3)) * c.tanh(), epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_seed_gives_zero_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = LstmParams::init(3, 4, &mut rng);
        let w = init::uniform(&[5, 3], -1.0, 1.0, &mut rng);
        let (_, cache) = lstm_forward(&p, &w).unwrap();
        let mut g = LstmParams::zeros(3, 4);
        let gx = lstm_backward(&p, &cache, &[0.0; 4], &mut g).unwrap();
        assert!(g.tensors().iter().all(|t| t.max_abs() == 0.0));
        assert_eq!(gx.max_abs(), 0.0);
    }

    #[test]
    fn hidden_state_is_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut p = LstmParams::init(4, 6, &mut rng);
        p.w_input.scale(3.0);
        let w = init::uniform(&[60, 4], -2.0, 2.0, &mut rng);
        let (h, _) = lstm_forward(&p, &w).unwrap();
        assert!(h.iter().all(|v| v.abs() < 1.0));
    }
}
