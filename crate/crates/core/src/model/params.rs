use std::collections::BTreeMap;

use rand::Rng;

use super::config::{ModelConfig, Variant};
use crate::data::NUM_CHANNELS;
use crate::error::{Error, Result};
use crate::nn::{init, Checkpoint, GruParams, LinearParams, LstmParams, ParamSet, Tensor};
use crate::quantum::CircuitParams;

#[derive(Debug, Clone, PartialEq)]
pub enum Encoder {
    Gru(GruParams),
    Lstm(LstmParams),
}

impl Encoder {
    pub fn hidden_size(&self) -> usize {
        match self {
            Encoder::Gru(p) => p.hidden_size,
            Encoder::Lstm(p) => p.hidden_size,
        }
    }

    fn zeros_like(&self) -> Self {
        match self {
            Encoder::Gru(p) => Encoder::Gru(GruParams::zeros(p.input_size, p.hidden_size)),
            Encoder::Lstm(p) => Encoder::Lstm(LstmParams::zeros(p.input_size, p.hidden_size)),
        }
    }

    fn inner(&self) -> &dyn ParamSet {
        match self {
            Encoder::Gru(p) => p,
            Encoder::Lstm(p) => p,
        }
    }

    fn inner_mut(&mut self) -> &mut dyn ParamSet {
        match self {
            Encoder::Gru(p) => p,
            Encoder::Lstm(p) => p,
        }
    }
}

/// Trainable variational angles, `depth × n_qubits × 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumLayer {
    pub omega: Tensor,
    pub entanglement: bool,
}

impl QuantumLayer {
    pub fn depth(&self) -> usize {
        self.omega.shape()[0]
    }

    pub fn n_qubits(&self) -> usize {
        self.omega.shape()[1]
    }

    /// Circuit parameters for one sample with embedding angles `theta`.
    pub fn circuit(&self, theta: Vec<f64>) -> CircuitParams {
        CircuitParams {
            theta,
            omega: self.omega.data().to_vec(),
            depth: self.depth(),
            entanglement: self.entanglement,
        }
    }
}

/// Every trainable tensor of a forecaster variant.
///
/// `projection` and `quantum` are present only for the hybrid variant. There
/// is one head per horizon, each mapping the feature vector to the four
/// channels.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridModelParams {
    pub variant: Variant,
    pub horizons: Vec<usize>,
    pub encoder: Encoder,
    pub projection: Option<LinearParams>,
    pub quantum: Option<QuantumLayer>,
    pub heads: Vec<LinearParams>,
}

impl HybridModelParams {
    /// Fan-in uniform weights, zero biases, and variational angles uniform in
    /// `[0, 2π)`.
    pub fn init<R: Rng>(config: &ModelConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let d_z = config.hidden_size;
        let encoder = match config.variant {
            Variant::Lstm => Encoder::Lstm(LstmParams::init(NUM_CHANNELS, d_z, rng)),
            _ => Encoder::Gru(GruParams::init(NUM_CHANNELS, d_z, rng)),
        };
        let (projection, quantum) = if config.variant.uses_circuit() {
            let n_q = config.n_qubits;
            (
                Some(LinearParams::init(d_z, n_q, rng)),
                Some(QuantumLayer {
                    omega: init::uniform(&[config.depth, n_q, 3], 0.0, std::f64::consts::TAU, rng),
                    entanglement: config.entanglement,
                }),
            )
        } else {
            (None, None)
        };
        let heads = config
            .horizons
            .iter()
            .map(|_| LinearParams::init(config.feature_size(), NUM_CHANNELS, rng))
            .collect();
        Ok(Self {
            variant: config.variant,
            horizons: config.horizons.clone(),
            encoder,
            projection,
            quantum,
            heads,
        })
    }

    /// Same structure, every tensor zero. Used as a gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        Self {
            variant: self.variant,
            horizons: self.horizons.clone(),
            encoder: self.encoder.zeros_like(),
            projection: self
                .projection
                .as_ref()
                .map(|p| LinearParams::zeros(p.input_size(), p.output_size())),
            quantum: self.quantum.as_ref().map(|q| QuantumLayer {
                omega: Tensor::zeros(q.omega.shape()),
                entanglement: q.entanglement,
            }),
            heads: self
                .heads
                .iter()
                .map(|h| LinearParams::zeros(h.input_size(), h.output_size()))
                .collect(),
        }
    }

    pub fn hidden_size(&self) -> usize {
        self.encoder.hidden_size()
    }

    pub fn feature_size(&self) -> usize {
        self.hidden_size() + self.quantum.as_ref().map_or(0, QuantumLayer::n_qubits)
    }

    /// Adds `other` into `self`; both must come from the same architecture.
    pub fn accumulate(&mut self, other: &HybridModelParams) -> Result<()> {
        let theirs = other.tensors();
        let mine = self.tensors_mut();
        if mine.len() != theirs.len() {
            return Err(Error::shape(
                "accumulating gradients of different architectures",
            ));
        }
        for (a, b) in mine.into_iter().zip(theirs) {
            a.add_assign(b)?;
        }
        Ok(())
    }

    pub fn to_checkpoint(&self, extra_meta: &BTreeMap<String, String>) -> Checkpoint {
        let mut meta = extra_meta.clone();
        meta.insert("variant".into(), self.variant.name().into());
        meta.insert(
            "horizons".into(),
            self.horizons
                .iter()
                .map(|h| h.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        if let Some(q) = &self.quantum {
            meta.insert("entanglement".into(), q.entanglement.to_string());
        }
        Checkpoint {
            meta,
            tensors: self
                .named_tensors()
                .into_iter()
                .map(|(n, t)| (n, t.clone()))
                .collect(),
        }
    }

    /// Rebuilds parameters from a checkpoint; tensor shapes define the
    /// architecture.
    pub fn from_checkpoint(ckpt: &Checkpoint) -> Result<Self> {
        let variant: Variant = ckpt.meta("variant")?.parse()?;
        let horizons = ckpt
            .meta("horizons")?
            .split(',')
            .map(|h| h.parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Checkpoint(format!("bad horizons: {e}")))?;
        let t = |name: &str| ckpt.get(name).cloned();
        let encoder = match variant {
            Variant::Lstm => {
                let w_input = t("encoder.w_input")?;
                let w_hidden = t("encoder.w_hidden")?;
                let p = LstmParams {
                    input_size: w_input.cols(),
                    hidden_size: w_hidden.cols(),
                    w_input,
                    w_hidden,
                    b_input: t("encoder.b_input")?,
                    b_hidden: t("encoder.b_hidden")?,
                };
                p.validate()?;
                Encoder::Lstm(p)
            }
            _ => {
                let w_input = t("encoder.w_input")?;
                let w_hidden = t("encoder.w_hidden")?;
                let p = GruParams {
                    input_size: w_input.cols(),
                    hidden_size: w_hidden.cols(),
                    w_input,
                    w_hidden,
                    b_input: t("encoder.b_input")?,
                    b_hidden: t("encoder.b_hidden")?,
                };
                p.validate()?;
                Encoder::Gru(p)
            }
        };
        let (projection, quantum) = if variant.uses_circuit() {
            let omega = t("quantum.omega")?;
            if omega.shape().len() != 3 || omega.shape()[2] != 3 {
                return Err(Error::Checkpoint(format!(
                    "bad omega shape {:?}",
                    omega.shape()
                )));
            }
            let entanglement = ckpt.meta("entanglement")? == "true";
            (
                Some(LinearParams::from_parts(
                    t("projection.weight")?,
                    t("projection.bias")?,
                )?),
                Some(QuantumLayer {
                    omega,
                    entanglement,
                }),
            )
        } else {
            (None, None)
        };
        let heads = horizons
            .iter()
            .map(|h| {
                LinearParams::from_parts(
                    t(&format!("head_h{h}.weight"))?,
                    t(&format!("head_h{h}.bias"))?,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let params = Self {
            variant,
            horizons,
            encoder,
            projection,
            quantum,
            heads,
        };
        params.check_consistency()?;
        Ok(params)
    }

    pub fn check_consistency(&self) -> Result<()> {
        let d_z = self.hidden_size();
        if let (Some(p), Some(q)) = (&self.projection, &self.quantum) {
            if p.input_size() != d_z || p.output_size() != q.n_qubits() {
                return Err(Error::shape(format!(
                    "projection is {}x{}, expected {}x{}",
                    p.output_size(),
                    p.input_size(),
                    q.n_qubits(),
                    d_z
                )));
            }
        }
        if self.heads.len() != self.horizons.len() {
            return Err(Error::shape("one head per horizon required"));
        }
        for h in &self.heads {
            if h.input_size() != self.feature_size() || h.output_size() != NUM_CHANNELS {
                return Err(Error::shape(format!(
                    "head is {}x{}, expected {}x{}",
                    h.output_size(),
                    h.input_size(),
                    NUM_CHANNELS,
                    self.feature_size()
                )));
            }
        }
        Ok(())
    }
}

impl ParamSet for HybridModelParams {
    fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        let mut out: Vec<(String, &Tensor)> = self
            .encoder
            .inner()
            .named_tensors()
            .into_iter()
            .map(|(n, t)| (format!("encoder.{n}"), t))
            .collect();
        if let Some(p) = &self.projection {
            out.extend(
                p.named_tensors()
                    .into_iter()
                    .map(|(n, t)| (format!("projection.{n}"), t)),
            );
        }
        if let Some(q) = &self.quantum {
            out.push(("quantum.omega".to_string(), &q.omega));
        }
        for (h, head) in self.horizons.iter().zip(&self.heads) {
            out.extend(
                head.named_tensors()
                    .into_iter()
                    .map(|(n, t)| (format!("head_h{h}.{n}"), t)),
            );
        }
        out
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = self.encoder.inner_mut().tensors_mut();
        if let Some(p) = &mut self.projection {
            out.extend(p.tensors_mut());
        }
        if let Some(q) = &mut self.quantum {
            out.push(&mut q.omega);
        }
        for head in &mut self.heads {
            out.extend(head.tensors_mut());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn checkpoint_round_trip_for_every_variant() {
        for variant in Variant::ALL {
            let config = ModelConfig {
                variant,
                hidden_size: 5,
                n_qubits: 3,
                depth: 2,
                ..ModelConfig::default()
            };
            let params =
                HybridModelParams::init(&config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
            let mut meta = BTreeMap::new();
            meta.insert("fold".to_string(), "3".to_string());
            let text = params.to_checkpoint(&meta).to_text();
            let ckpt = Checkpoint::parse(&text).unwrap();
            assert_eq!(ckpt.meta("fold").unwrap(), "3");
            assert_eq!(HybridModelParams::from_checkpoint(&ckpt).unwrap(), params);
        }
    }

    #[test]
    fn names_and_tensors_line_up() {
        let config = ModelConfig {
            hidden_size: 4,
            ..ModelConfig::default()
        };
        let mut params =
            HybridModelParams::init(&config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let shapes: Vec<Vec<usize>> = params
            .named_tensors()
            .iter()
            .map(|(_, t)| t.shape().to_vec())
            .collect();
        let shapes_mut: Vec<Vec<usize>> = params
            .tensors_mut()
            .iter()
            .map(|t| t.shape().to_vec())
            .collect();
        assert_eq!(shapes, shapes_mut);
        assert_eq!(params.heads[0].input_size(), 4 + 6);
        assert_eq!(params.quantum.as_ref().unwrap().omega.shape(), &[3, 6, 3]);
    }
}
