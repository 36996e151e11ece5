use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use fgf_core::fusion::{AttentionScope, ClassWeightMode, Kernel, LossMix};
use fgf_core::graphset::{IngestMode, SplitSpec};
use fgf_core::optimizer::{Algorithm, RunConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

/// Fields that may be read from externally exported embedding files instead
/// of the built-in hash backend.
pub const EXTERNAL_FIELDS: [&str; 5] = [
    "failure_mode",
    "failure_reason",
    "failure_effect",
    "emergency_measure",
    "verb",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusSource {
    #[default]
    Offline,
    Live,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorpusConfig {
    /// Taxonomy file; the built-in table when absent.
    pub taxonomy: Option<PathBuf>,
    pub source: CorpusSource,
    /// Offline JSONL snapshot.
    pub path: Option<PathBuf>,
    /// Relevant document ids, one per line; overrides labels in the snapshot.
    pub labels: Option<PathBuf>,
    pub max_results: usize,
    pub cache_dir: PathBuf,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            taxonomy: None,
            source: CorpusSource::Offline,
            path: None,
            labels: None,
            max_results: 200,
            cache_dir: PathBuf::from(".fgf-cache"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerConfig {
    pub algos: Vec<Algorithm>,
    pub n_nests: usize,
    pub iterations: usize,
    pub pa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub hncsa_gamma: f64,
    pub hncsa_eps: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let r = RunConfig::default();
        Self {
            algos: Algorithm::ALL.to_vec(),
            n_nests: r.n_nests,
            iterations: r.iterations,
            pa: r.pa,
            alpha: r.alpha,
            beta: r.beta,
            hncsa_gamma: r.hncsa_gamma,
            hncsa_eps: r.hncsa_eps,
        }
    }
}

impl OptimizerConfig {
    pub fn run_config(&self, algo: Algorithm, seed: u64) -> RunConfig {
        RunConfig {
            algo,
            n_nests: self.n_nests,
            iterations: self.iterations,
            pa: self.pa,
            alpha: self.alpha,
            beta: self.beta,
            seed,
            hncsa_gamma: self.hncsa_gamma,
            hncsa_eps: self.hncsa_eps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecordsConfig {
    /// Failure-mode records, CSV or JSONL by extension.
    pub path: Option<PathBuf>,
    pub mode: IngestMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EmbedConfig {
    pub sub_com_dim: usize,
    pub sgns_epochs: usize,
    pub sgns_window: usize,
    pub sgns_negatives: usize,
    pub ngram: usize,
    pub softmax: bool,
    /// Width of built-in phrase vectors (failure mode and reason).
    pub phrase_dim: usize,
    /// Width of built-in sentence vectors (effect and measure).
    pub sentence_dim: usize,
    pub sweep_dims: Vec<usize>,
    /// Field name to an embedding file that replaces the built-in backend.
    pub external: BTreeMap<String, PathBuf>,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            sub_com_dim: 100,
            sgns_epochs: 20,
            sgns_window: 5,
            sgns_negatives: 5,
            ngram: 2,
            softmax: true,
            phrase_dim: 768,
            sentence_dim: 384,
            sweep_dims: vec![50, 100, 150, 200, 250, 300],
            external: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelName {
    #[default]
    Rbf,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FusionConfig {
    pub kernel: KernelName,
    /// RBF width; `1 / input_dim` when absent.
    pub rbf_gamma: Option<f64>,
    pub target_variance: f64,
    /// Fixed component count, overriding the variance target.
    pub components: Option<usize>,
    pub d_sub: f64,
    pub d_com: f64,
    pub attention: AttentionScope,
    /// Verb lexicon, one verb per line; the built-in list when absent.
    pub verbs: Option<PathBuf>,
    pub loss_mix: LossMix,
    pub class_weights: ClassWeightMode,
    pub standardize: bool,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            kernel: KernelName::Rbf,
            rbf_gamma: None,
            target_variance: fgf_core::fusion::DEFAULT_TARGET_VARIANCE,
            components: None,
            d_sub: 1.0,
            d_com: 2.0,
            attention: AttentionScope::Global,
            verbs: None,
            loss_mix: LossMix::default(),
            class_weights: ClassWeightMode::Fusion,
            standardize: true,
        }
    }
}

impl FusionConfig {
    pub fn kernel(&self) -> Kernel {
        match self.kernel {
            KernelName::Rbf => Kernel::Rbf {
                gamma: self.rbf_gamma,
            },
            KernelName::Linear => Kernel::Linear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphConfig {
    /// Edge list; the graph has no edges when absent.
    pub edges: Option<PathBuf>,
    pub undirected: bool,
    pub split: SplitSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateConfig {
    pub clusters: usize,
    pub max_iter: usize,
    pub distance_csv: bool,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            clusters: 12,
            max_iter: 300,
            distance_csv: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub corpus: CorpusConfig,
    pub optimizer: OptimizerConfig,
    pub records: RecordsConfig,
    pub embed: EmbedConfig,
    pub fusion: FusionConfig,
    pub graph: GraphConfig,
    pub validate: ValidateConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: None,
            out: PathBuf::from("out"),
            corpus: CorpusConfig::default(),
            optimizer: OptimizerConfig::default(),
            records: RecordsConfig::default(),
            embed: EmbedConfig::default(),
            fusion: FusionConfig::default(),
            graph: GraphConfig::default(),
            validate: ValidateConfig::default(),
        }
    }
}

/// A parsed configuration with paths resolved against the config file's
/// directory.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: PipelineConfig,
    pub base: PathBuf,
    pub out: PathBuf,
    pub hash: String,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// The seed, or a configuration error naming the stage that needs it.
    pub fn seed(&self, stage: &str) -> Result<u64, Failure> {
        self.config.seed.ok_or_else(|| {
            Failure::config(format!(
                "`{stage}` needs a seed: set `seed` in the config or pass --seed"
            ))
        })
    }

    /// The display form of a path in manifests: relative to the output
    /// directory or the config directory when possible.
    pub fn display(&self, p: &Path) -> String {
        if let Ok(rel) = p.strip_prefix(&self.out) {
            return format!("$OUT/{}", rel.display());
        }
        if let Ok(rel) = p.strip_prefix(&self.base) {
            return rel.display().to_string();
        }
        p.display().to_string()
    }
}

fn check_range(ok: bool, what: &str) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::config(what.to_string()))
    }
}

impl PipelineConfig {
    fn referenced_paths(&self) -> Vec<(&'static str, &Path)> {
        let corpus = match self.corpus.source {
            CorpusSource::Offline => self.corpus.path.as_deref(),
            CorpusSource::Live => None,
        };
        let mut v: Vec<(&'static str, &Path)> = [
            ("corpus.taxonomy", self.corpus.taxonomy.as_deref()),
            ("corpus.path", corpus),
            ("corpus.labels", self.corpus.labels.as_deref()),
            ("records.path", self.records.path.as_deref()),
            ("fusion.verbs", self.fusion.verbs.as_deref()),
            ("graph.edges", self.graph.edges.as_deref()),
        ]
        .into_iter()
        .filter_map(|(name, p)| p.map(|p| (name, p)))
        .collect();
        v.extend(
            self.embed
                .external
                .values()
                .map(|p| ("embed.external", p.as_path())),
        );
        v
    }

    fn check_values(&self) -> Result<(), Failure> {
        for algo in &self.optimizer.algos {
            self.optimizer.run_config(*algo, 0).validate()?;
        }
        if self.optimizer.algos.is_empty() {
            return Err(Failure::config("optimizer.algos is empty"));
        }
        let e = &self.embed;
        check_range(
            e.sub_com_dim > 0 && e.phrase_dim > 0 && e.sentence_dim > 0,
            "embedding widths must be positive",
        )?;
        check_range(
            e.sgns_epochs > 0 && e.sgns_window > 0,
            "embed.sgns_epochs and embed.sgns_window must be positive",
        )?;
        check_range(e.ngram > 0, "embed.ngram must be positive")?;
        check_range(
            e.sweep_dims.iter().all(|&d| d > 0),
            "embed.sweep_dims must be positive",
        )?;
        if let Some(bad) = e
            .external
            .keys()
            .find(|k| !EXTERNAL_FIELDS.contains(&k.as_str()))
        {
            return Err(Failure::config(format!(
                "embed.external has unknown field {bad:?}; expected one of {}",
                EXTERNAL_FIELDS.join(", ")
            )));
        }
        let f = &self.fusion;
        check_range(
            f.target_variance > 0.0 && f.target_variance <= 1.0,
            "fusion.target_variance must lie in (0, 1]",
        )?;
        check_range(
            f.components != Some(0),
            "fusion.components must be positive",
        )?;
        check_range(
            f.rbf_gamma.is_none_or(|g| g > 0.0 && g.is_finite()),
            "fusion.rbf_gamma must be positive",
        )?;
        self.graph.split.validate()?;
        check_range(
            self.validate.clusters > 0,
            "validate.clusters must be positive",
        )?;
        check_range(
            self.corpus.max_results > 0,
            "corpus.max_results must be positive",
        )?;
        Ok(())
    }
}

/// Canonical hash of the configuration content, excluding the output
/// directory and thread count.
pub fn config_hash(config: &PipelineConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    hex::encode(&Sha256::digest(json.as_bytes())[..16])
}

pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn load(path: &Path, overrides: Overrides) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
    let mut config: PipelineConfig = toml::from_str(&text)
        .map_err(|e| Failure::config(format!("invalid config {}: {e}", path.display())))?;
    if overrides.seed.is_some() {
        config.seed = overrides.seed;
    }
    let base = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let out = match overrides.out {
        Some(o) => o,
        None if config.out.is_absolute() => config.out.clone(),
        None => base.join(&config.out),
    };
    config.check_values()?;
    let loaded = Loaded {
        hash: config_hash(&config),
        config,
        base,
        out,
    };
    for (name, p) in loaded.config.referenced_paths() {
        let full = loaded.resolve(p);
        if !full.exists() {
            return Err(Failure::config(format!(
                "{name} refers to {}, which does not exist",
                full.display()
            )));
        }
    }
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_defaults() {
        let c: PipelineConfig = toml::from_str("").unwrap();
        assert_eq!(c, PipelineConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<PipelineConfig>("[fusion]\nkernal = \"rbf\"\n").is_err());
    }

    #[test]
    fn hash_ignores_output_dir() {
        let a = PipelineConfig::default();
        let b = PipelineConfig {
            out: PathBuf::from("elsewhere"),
            ..PipelineConfig::default()
        };
        assert_eq!(config_hash(&a), config_hash(&b));
        let c = PipelineConfig {
            seed: Some(3),
            ..PipelineConfig::default()
        };
        assert_ne!(config_hash(&a), config_hash(&c));
    }
}
