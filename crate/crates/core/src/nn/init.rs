//! Parameter initialisation.

use rand::Rng;

use super::Tensor;

/// Uniform in `[-1/√fan_in, 1/√fan_in]`.
pub fn uniform_fan_in<R: Rng>(shape: &[usize], fan_in: usize, rng: &mut R) -> Tensor {
    let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
    uniform(shape, -bound, bound, rng)
}

pub fn uniform<R: Rng>(shape: &[usize], low: f64, high: f64, rng: &mut R) -> Tensor {
    let n: usize = shape.iter().product();
    let data = (0..n).map(|_| rng.gen_range(low..high)).collect();
    Tensor::from_vec(shape, data).expect("length matches shape")
}
