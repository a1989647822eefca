//! Dense and recurrent layers with hand-written backward passes.
//!
//! Every layer follows the same pattern: `forward` returns its output plus
//! whatever the backward pass needs, and `backward_into` accumulates
//! parameter gradients into a zero-initialised parameter struct of the same
//! type so mini-batches can be summed without extra allocations.

mod adam;
pub mod checkpoint;
mod gru;
pub mod init;
mod linear;
mod loss;
mod lstm;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use checkpoint::Checkpoint;
pub use gru::{gru_backward, gru_forward, GruCache, GruParams};
pub use linear::{linear_backward, linear_forward, LinearParams};
pub use loss::mse_loss;
pub use lstm::{lstm_backward, lstm_forward, LstmCache, LstmParams};
pub use tensor::Tensor;

/// A fixed, ordered collection of named parameter tensors.
///
/// The order returned by [`ParamSet::named_tensors`] and
/// [`ParamSet::tensors_mut`] must match; optimizers and checkpoints rely on it.
pub trait ParamSet {
    fn named_tensors(&self) -> Vec<(String, &Tensor)>;
    fn tensors_mut(&mut self) -> Vec<&mut Tensor>;

    fn tensors(&self) -> Vec<&Tensor> {
        self.named_tensors().into_iter().map(|(_, t)| t).collect()
    }

    fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn zero_grad(&mut self) {
        for t in self.tensors_mut() {
            t.fill(0.0);
        }
    }

    fn all_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `out += W[row_offset.., :] · x` for `out.len()` rows of a row-major matrix.
#[inline]
pub(crate) fn matvec_add(w: &[f64], cols: usize, row_offset: usize, x: &[f64], out: &mut [f64]) {
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[(row_offset + r) * cols..(row_offset + r + 1) * cols];
        *o += row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// `grad_w += g ⊗ x`, `grad_x += Wᵀ g` for a row-major `rows × cols` matrix.
#[inline]
pub(crate) fn outer_backward(
    w: &[f64],
    cols: usize,
    g: &[f64],
    x: &[f64],
    grad_w: &mut [f64],
    grad_x: Option<&mut [f64]>,
) {
    for (r, gr) in g.iter().enumerate() {
        if *gr == 0.0 {
            continue;
        }
        let gw = &mut grad_w[r * cols..(r + 1) * cols];
        for (gw, xv) in gw.iter_mut().zip(x) {
            *gw += gr * xv;
        }
    }
    if let Some(gx) = grad_x {
        for (r, gr) in g.iter().enumerate() {
            if *gr == 0.0 {
                continue;
            }
            let row = &w[r * cols..(r + 1) * cols];
            for (gx, wv) in gx.iter_mut().zip(row) {
                *gx += gr * wv;
            }
        }
    }
}
