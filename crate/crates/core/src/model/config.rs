use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::MAX_QUBITS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// GRU encoder, angle projection, VQC mixer, heads on `[z ‖ q]`.
    Hybrid,
    /// GRU encoder with heads on `z` only.
    GruOnly,
    /// LSTM encoder with heads on its final hidden state.
    #[serde(alias = "lstm_baseline")]
    Lstm,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Hybrid, Variant::GruOnly, Variant::Lstm];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Hybrid => "hybrid",
            Variant::GruOnly => "gru_only",
            Variant::Lstm => "lstm",
        }
    }

    pub fn uses_circuit(self) -> bool {
        self == Variant::Hybrid
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "hybrid" => Ok(Variant::Hybrid),
            "gru_only" | "gru" => Ok(Variant::GruOnly),
            "lstm" | "lstm_baseline" => Ok(Variant::Lstm),
            other => Err(Error::Config(format!(
                "unknown variant {other:?} (expected hybrid, gru_only or lstm)"
            ))),
        }
    }
}

/// Architecture and optimisation settings for one model. Defaults are the
/// reference setup: 240 s windows, horizons 15/30/60 s, 6 qubits, depth 3,
/// ring entanglement, 30 epochs of batch-128 Adam at 1e-3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub variant: Variant,
    pub n_qubits: usize,
    pub depth: usize,
    pub entanglement: bool,
    pub hidden_size: usize,
    pub window: usize,
    pub horizons: Vec<usize>,
    pub stride: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub val_fraction: f64,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            variant: Variant::Hybrid,
            n_qubits: 6,
            depth: 3,
            entanglement: true,
            hidden_size: 56,
            window: 240,
            horizons: vec![15, 30, 60],
            stride: 1,
            epochs: 30,
            batch_size: 128,
            learning_rate: 1e-3,
            val_fraction: 0.1,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    pub fn max_horizon(&self) -> usize {
        self.horizons.last().copied().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.variant.uses_circuit() {
            if self.n_qubits == 0 {
                return fail("hybrid variant needs at least one qubit".into());
            }
            if self.n_qubits > MAX_QUBITS {
                return fail(format!("at most {MAX_QUBITS} qubits are supported"));
            }
            if self.entanglement && self.depth > 0 && self.n_qubits < 2 {
                return fail("ring entanglement needs at least 2 qubits".into());
            }
        }
        if self.hidden_size == 0 || self.window == 0 || self.stride == 0 {
            return fail("hidden_size, window and stride must be positive".into());
        }
        if self.horizons.is_empty()
            || self.horizons.windows(2).any(|w| w[0] >= w[1])
            || self.horizons[0] == 0
        {
            return fail(format!(
                "horizons must be positive and strictly increasing, got {:?}",
                self.horizons
            ));
        }
        if self.epochs == 0 || self.batch_size == 0 {
            return fail("epochs and batch_size must be positive".into());
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return fail(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if !(0.0..1.0).contains(&self.val_fraction) {
            return fail(format!(
                "val_fraction must be in [0, 1), got {}",
                self.val_fraction
            ));
        }
        Ok(())
    }

    /// Width of the head input: `d_z + n_q` for the hybrid, `d_z` otherwise.
    pub fn feature_size(&self) -> usize {
        if self.variant.uses_circuit() {
            self.hidden_size + self.n_qubits
        } else {
            self.hidden_size
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = ModelConfig::default();
        c.validate().unwrap();
        assert_eq!(c.feature_size(), 62);
        assert_eq!(c.with_variant(Variant::GruOnly).feature_size(), 56);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = ModelConfig::default();
        let bad = [
            ModelConfig {
                n_qubits: 0,
                ..base.clone()
            },
            ModelConfig {
                horizons: vec![30, 15],
                ..base.clone()
            },
            ModelConfig {
                horizons: vec![],
                ..base.clone()
            },
            ModelConfig {
                epochs: 0,
                ..base.clone()
            },
            ModelConfig {
                learning_rate: -1.0,
                ..base.clone()
            },
            ModelConfig {
                n_qubits: 1,
                ..base.clone()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        ModelConfig {
            n_qubits: 0,
            ..base.with_variant(Variant::GruOnly)
        }
        .validate()
        .unwrap();
    }

    #[test]
    fn variant_names() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("lstm_baseline".parse::<Variant>().unwrap(), Variant::Lstm);
        assert!("cnn".parse::<Variant>().is_err());
    }
}
