//! Run configuration: one TOML file per experiment.
//!
//! ```toml
//! manifest = "data/manifest.csv"      # relative to this file
//! output_dir = "runs/baseline"        # optional, see below
//! variants = ["hybrid", "gru_only", "lstm"]
//! folds = "all"                       # or e.g. "1-5,9"
//! jobs = 0                            # 0 = one worker per core
//! raw_units = false                   # also emit metrics in recorded units
//!
//! [model]                             # shared overrides of the defaults
//! epochs = 30
//!
//! [models.lstm]                       # per-variant overrides
//! hidden_size = 64
//!
//! [ablation]
//! noise_levels = [0.0, 0.01, 0.05]
//! missing_levels = [0.0, 0.1, 0.3]
//! seed = 0
//! ```
//!
//! Without `output_dir`, results go to `<root>/<config file stem>` where
//! `<root>` is `$HQF_OUTPUT_ROOT`, or `runs/` next to the config file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hqf_core::data::{CorruptionKind, CorruptionSpec, MISSING_LEVELS, NOISE_LEVELS};
use hqf_core::{ModelConfig, Variant};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::{AtStage, CliResult, Failure, Stage};

pub const OUTPUT_ROOT_ENV: &str = "HQF_OUTPUT_ROOT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationConfig {
    pub noise_levels: Vec<f64>,
    pub missing_levels: Vec<f64>,
    pub seed: u64,
    /// Accept levels outside the standard grids.
    pub allow_custom_levels: bool,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self {
            noise_levels: NOISE_LEVELS.to_vec(),
            missing_levels: MISSING_LEVELS.to_vec(),
            seed: 0,
            allow_custom_levels: false,
        }
    }
}

impl AblationConfig {
    pub fn specs(&self, kind: CorruptionKind) -> CliResult<Vec<CorruptionSpec>> {
        let levels = match kind {
            CorruptionKind::GaussianNoise => &self.noise_levels,
            CorruptionKind::Missing => &self.missing_levels,
        };
        levels
            .iter()
            .map(|&level| {
                let spec = CorruptionSpec {
                    kind,
                    level,
                    seed: self.seed,
                };
                spec.validate(self.allow_custom_levels).at(Stage::Config)?;
                Ok(spec)
            })
            .collect()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    manifest: PathBuf,
    output_dir: Option<PathBuf>,
    #[serde(default = "all_variants")]
    variants: Vec<Variant>,
    folds: Option<String>,
    #[serde(default)]
    jobs: usize,
    #[serde(default)]
    raw_units: bool,
    #[serde(default)]
    model: toml::Table,
    #[serde(default)]
    models: BTreeMap<String, toml::Table>,
    #[serde(default)]
    ablation: AblationConfig,
}

fn all_variants() -> Vec<Variant> {
    Variant::ALL.to_vec()
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub output_dir: PathBuf,
    pub variants: Vec<Variant>,
    /// Fold selection as written; resolved once the subject count is known.
    pub folds: Option<String>,
    pub jobs: usize,
    pub raw_units: bool,
    models: BTreeMap<Variant, ModelConfig>,
    pub ablation: AblationConfig,
    pub hash: String,
}

#[derive(Serialize)]
struct HashInput<'a> {
    manifest_sha256: String,
    models: Vec<&'a ModelConfig>,
    ablation: &'a AblationConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(Stage::Config, format!("{}: {e}", path.display())))?;
        let output_root = std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from);
        Self::parse(&text, path, output_root.as_deref())
    }

    pub fn parse(text: &str, path: &Path, output_root: Option<&Path>) -> CliResult<Self> {
        let raw: RawConfig = toml::from_str(text)
            .map_err(|e| Failure::new(Stage::Config, format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let stem = path
            .file_stem()
            .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());

        if raw.variants.is_empty() {
            return Err(Failure::new(
                Stage::Config,
                "at least one variant is required",
            ));
        }
        let mut variants = Vec::new();
        for v in raw.variants {
            if !variants.contains(&v) {
                variants.push(v);
            }
        }

        let mut overrides = BTreeMap::new();
        for (name, table) in raw.models {
            let variant: Variant = name.parse().at(Stage::Config)?;
            overrides.insert(variant, table);
        }
        let mut models = BTreeMap::new();
        for &variant in &variants {
            let mut table = raw.model.clone();
            if let Some(extra) = overrides.get(&variant) {
                table.extend(extra.clone());
            }
            table.insert("variant".into(), toml::Value::String(variant.name().into()));
            let config: ModelConfig = toml::Value::Table(table).try_into().map_err(|e| {
                Failure::new(Stage::Config, format!("model config for {variant}: {e}"))
            })?;
            config.validate().at(Stage::Config)?;
            models.insert(variant, config);
        }

        for kind in [CorruptionKind::GaussianNoise, CorruptionKind::Missing] {
            raw.ablation.specs(kind)?;
        }

        let manifest = base.join(&raw.manifest);
        let manifest_bytes = std::fs::read(&manifest).map_err(|e| {
            Failure::new(
                Stage::Config,
                format!("manifest {}: {e}", manifest.display()),
            )
        })?;
        let hash_input = HashInput {
            manifest_sha256: hex::encode(Sha256::digest(&manifest_bytes)),
            models: models.values().collect(),
            ablation: &raw.ablation,
        };
        let canonical = serde_json::to_vec(&hash_input).at(Stage::Config)?;
        let hash = hex::encode(Sha256::digest(&canonical))[..16].to_string();

        let output_dir = match (raw.output_dir, output_root) {
            (Some(dir), _) => base.join(dir),
            (None, Some(root)) => root.join(&stem),
            (None, None) => base.join("runs").join(&stem),
        };

        Ok(Self {
            manifest,
            output_dir,
            variants,
            folds: raw.folds,
            jobs: raw.jobs,
            raw_units: raw.raw_units,
            models,
            ablation: raw.ablation,
            hash,
        })
    }

    pub fn model(&self, variant: Variant) -> CliResult<&ModelConfig> {
        self.models.get(&variant).ok_or_else(|| {
            Failure::new(
                Stage::Config,
                format!("variant {variant} is not configured"),
            )
        })
    }

    pub fn variant_names(&self) -> Vec<String> {
        self.variants.iter().map(|v| v.name().to_string()).collect()
    }

    /// Restricts the run to `subset`, which must be configured variants.
    pub fn select_variants(&mut self, subset: &[Variant]) -> CliResult<()> {
        for v in subset {
            self.model(*v)?;
        }
        self.variants = subset.to_vec();
        Ok(())
    }

    pub fn ensure_output_dir(&self) -> CliResult<()> {
        std::fs::create_dir_all(&self.output_dir).map_err(|e| {
            Failure::new(
                Stage::Config,
                format!("output directory {}: {e}", self.output_dir.display()),
            )
        })
    }
}

/// Parses `all` or a comma list of 1-based indices and ranges (`1-3,7`).
pub fn parse_folds(spec: &str, n_folds: usize) -> CliResult<Vec<usize>> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("all") {
        return Ok((1..=n_folds).collect());
    }
    let bad = |part: &str| Failure::new(Stage::Config, format!("invalid fold selection {part:?}"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse::<usize>(), b.trim().parse::<usize>()),
            None => (part.parse(), part.parse()),
        };
        let (Ok(lo), Ok(hi)) = (lo, hi) else {
            return Err(bad(part));
        };
        if lo == 0 || lo > hi || hi > n_folds {
            return Err(Failure::new(
                Stage::Config,
                format!("fold selection {part:?} outside 1..={n_folds}"),
            ));
        }
        out.extend(lo..=hi);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn parse_variants(list: &str) -> CliResult<Vec<Variant>> {
    list.split(',')
        .map(|s| s.trim().parse::<Variant>().at(Stage::Config))
        .collect()
}
