//! Test-time input corruption. Both injectors leave targets alone and act on
//! standardized inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::WindowSample;
use crate::error::{Error, Result};
use crate::nn::Tensor;

pub const NOISE_LEVELS: [f64; 3] = [0.0, 0.01, 0.05];
pub const MISSING_LEVELS: [f64; 3] = [0.0, 0.1, 0.3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorruptionKind {
    GaussianNoise,
    Missing,
}

impl CorruptionKind {
    pub fn name(self) -> &'static str {
        match self {
            CorruptionKind::GaussianNoise => "noise",
            CorruptionKind::Missing => "missing",
        }
    }

    pub fn default_levels(self) -> &'static [f64] {
        match self {
            CorruptionKind::GaussianNoise => &NOISE_LEVELS,
            CorruptionKind::Missing => &MISSING_LEVELS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub kind: CorruptionKind,
    /// σ for noise, masking probability for missingness.
    pub level: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    /// Checks the level against the standard grid, or only its legal range
    /// when `allow_custom` is set.
    pub fn validate(&self, allow_custom: bool) -> Result<()> {
        let ok_range = match self.kind {
            CorruptionKind::GaussianNoise => self.level >= 0.0 && self.level.is_finite(),
            CorruptionKind::Missing => (0.0..1.0).contains(&self.level),
        };
        if !ok_range {
            return Err(Error::Config(format!(
                "{} level {} out of range",
                self.kind.name(),
                self.level
            )));
        }
        if !allow_custom && !self.kind.default_levels().contains(&self.level) {
            return Err(Error::Config(format!(
                "{} level {} not in {:?}",
                self.kind.name(),
                self.level,
                self.kind.default_levels()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, input: &Tensor, rng: &mut ChaCha8Rng) -> Result<Tensor> {
        match self.kind {
            CorruptionKind::GaussianNoise => noise_with(input, self.level, rng),
            CorruptionKind::Missing => missing_with(input, self.level, rng),
        }
    }
}

/// `x' = x + ε`, `ε ~ N(0, σ²)` drawn independently per element.
pub fn inject_noise(input: &Tensor, sigma: f64, seed: u64) -> Result<Tensor> {
    noise_with(input, sigma, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn noise_with(input: &Tensor, sigma: f64, rng: &mut ChaCha8Rng) -> Result<Tensor> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::Config(format!(
            "noise sigma must be >= 0, got {sigma}"
        )));
    }
    let mut out = input.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
    for v in out.data_mut() {
        *v += normal.sample(rng);
    }
    Ok(out)
}

/// Masks each element with probability `p`, then fills every column
/// forward and, for a leading gap, backward. A fully masked column becomes
/// 0, the standardized mean.
pub fn inject_missing(input: &Tensor, p: f64, seed: u64) -> Result<Tensor> {
    missing_with(input, p, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn missing_with(input: &Tensor, p: f64, rng: &mut ChaCha8Rng) -> Result<Tensor> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Config(format!(
            "missing rate must be in [0, 1), got {p}"
        )));
    }
    let mut out = input.clone();
    if p == 0.0 {
        return Ok(out);
    }
    for v in out.data_mut() {
        if rng.gen::<f64>() < p {
            *v = f64::NAN;
        }
    }
    let (rows, cols) = (out.rows(), out.cols());
    let mut column = vec![0.0; rows];
    for c in 0..cols {
        for (r, v) in column.iter_mut().enumerate() {
            *v = out.get2(r, c);
        }
        impute_forward_backward(&mut column, 0.0);
        for (r, v) in column.iter().enumerate() {
            out.set2(r, c, *v);
        }
    }
    Ok(out)
}

/// Fills `NaN` entries with the last observed value, then fills a leading
/// gap with the first observed value. Returns how many entries were filled.
pub fn impute_forward_backward(column: &mut [f64], fallback: f64) -> usize {
    let missing = column.iter().filter(|v| v.is_nan()).count();
    if missing == 0 {
        return 0;
    }
    let Some(first) = column.iter().position(|v| !v.is_nan()) else {
        column.iter_mut().for_each(|v| *v = fallback);
        return missing;
    };
    let mut last = column[first];
    for v in column[first..].iter_mut() {
        if v.is_nan() {
            *v = last;
        } else {
            last = *v;
        }
    }
    let lead = column[first];
    column[..first].iter_mut().for_each(|v| *v = lead);
    missing
}

/// Corrupts the input of every window. Window `i` draws from stream `i` of
/// the spec's seed, so the result does not depend on evaluation order.
pub fn corrupt_windows(
    windows: &[WindowSample],
    spec: &CorruptionSpec,
) -> Result<Vec<WindowSample>> {
    spec.validate(true)?;
    windows
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            Ok(WindowSample {
                input: spec.apply(&w.input, &mut rng)?,
                ..w.clone()
            })
        })
        .collect()
}
