use rand::Rng;

use super::{init, matvec_add, outer_backward, ParamSet, Tensor};
use crate::error::{Error, Result};

/// Affine map `y = W x + b` with `W` stored `out × in`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearParams {
    pub weight: Tensor,
    pub bias: Tensor,
}

impl LinearParams {
    pub fn zeros(input: usize, output: usize) -> Self {
        Self {
            weight: Tensor::zeros(&[output, input]),
            bias: Tensor::zeros(&[output]),
        }
    }

    pub fn init<R: Rng>(input: usize, output: usize, rng: &mut R) -> Self {
        Self {
            weight: init::uniform_fan_in(&[output, input], input, rng),
            bias: Tensor::zeros(&[output]),
        }
    }

    pub fn from_parts(weight: Tensor, bias: Tensor) -> Result<Self> {
        if weight.shape().len() != 2 || bias.shape() != [weight.rows()] {
            return Err(Error::shape(format!(
                "linear weight {:?} and bias {:?} disagree",
                weight.shape(),
                bias.shape()
            )));
        }
        Ok(Self { weight, bias })
    }

    pub fn input_size(&self) -> usize {
        self.weight.cols()
    }

    pub fn output_size(&self) -> usize {
        self.weight.rows()
    }
}

impl ParamSet for LinearParams {
    fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        vec![
            ("weight".to_string(), &self.weight),
            ("bias".to_string(), &self.bias),
        ]
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.weight, &mut self.bias]
    }
}

pub fn linear_forward(params: &LinearParams, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != params.input_size() {
        return Err(Error::shape(format!(
            "linear layer expects {} inputs, got {}",
            params.input_size(),
            x.len()
        )));
    }
    let mut y = params.bias.data().to_vec();
    matvec_add(params.weight.data(), params.input_size(), 0, x, &mut y);
    Ok(y)
}

/// Accumulates `∂/∂W`, `∂/∂b` into `grads` and returns `∂/∂x`.
pub fn linear_backward(
    params: &LinearParams,
    x: &[f64],
    grad_y: &[f64],
    grads: &mut LinearParams,
) -> Result<Vec<f64>> {
    if x.len() != params.input_size() || grad_y.len() != params.output_size() {
        return Err(Error::shape(format!(
            "linear backward got x[{}], dy[{}] for a {}x{} layer",
            x.len(),
            grad_y.len(),
            params.output_size(),
            params.input_size()
        )));
    }
    let mut grad_x = vec![0.0; x.len()];
    outer_backward(
        params.weight.data(),
        params.input_size(),
        grad_y,
        x,
        grads.weight.data_mut(),
        Some(&mut grad_x),
    );
    for (gb, g) in grads.bias.data_mut().iter_mut().zip(grad_y) {
        *gb += g;
    }
    Ok(grad_x)
}
