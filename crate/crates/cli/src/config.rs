//! Run configuration.
//!
//! A run is described by one TOML file. Every key is optional; missing keys
//! take the defaults shown here:
//!
//! ```toml
//! seed = 42
//! policy = "fully_covered"        # or "any_hit"
//! partition = "80/10/10"          # train/validation/test percentages
//! out_dir = "out"
//!
//! [inputs]                        # all optional until a subcommand needs them
//! reports = "reports.jsonl"
//! splitter = "abbreviations.txt"  # built-in list when unset
//! rules = "rules.tsv"             # built-in rules when unset
//! ontology = "ontology.json"      # built-in ontology when unset
//! tags = "tags.jsonl"             # empty tag store when unset
//! pool = "pool.csv"
//! ratings = "ratings.jsonl"
//! predictions = "predictions.csv"
//! labels = "labels.csv"
//! eval_sets = "eval_sets.json"
//! event_log = "events.jsonl"
//! image_dir = "images"
//!
//! [ingest]
//! strict = false                  # fail on malformed lines instead of rejecting them
//!
//! [quotas]
//! validation_min_pos = 25
//! test_base = 5000
//! test_min_pos = 100
//!
//! [bootstrap]
//! n = 10000
//! level = 0.95
//!
//! [eval]
//! threshold_reference = "labels"  # or "raters"
//! fallback_threshold = 0.5
//!
//! [serve]
//! addr = "127.0.0.1:8080"
//! queue_coverage = "single"       # or "per_rater"
//! ```
//!
//! Relative paths are resolved against the directory holding the config
//! file, or against the data directory when there is no file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cxrlabel_core::labels::{PartitionRatios, Policy};
use cxrlabel_service::QueueCoverage;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

/// Environment variable naming the default data directory.
pub const DATA_DIR_ENV: &str = "CXRLABEL_DATA_DIR";
/// Config file looked up in the data directory when none is given.
pub const DEFAULT_CONFIG_NAME: &str = "cxrlabel.toml";

fn via_str<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn from_str<'de, T, D>(d: D) -> Result<T, D::Error>
where
    T: FromStr,
    T::Err: fmt::Display,
    D: Deserializer<'de>,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(serialize_with = "via_str", deserialize_with = "from_str")]
    pub policy: Policy,
    #[serde(serialize_with = "via_str", deserialize_with = "from_str")]
    pub partition: PartitionRatios,
    pub out_dir: PathBuf,
    pub inputs: Inputs,
    pub ingest: IngestConfig,
    pub quotas: Quotas,
    pub bootstrap: BootstrapConfig,
    pub eval: EvalConfig,
    pub serve: ServeConfig,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    pub reports: Option<PathBuf>,
    pub splitter: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub pool: Option<PathBuf>,
    pub ratings: Option<PathBuf>,
    pub predictions: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub eval_sets: Option<PathBuf>,
    pub event_log: Option<PathBuf>,
    pub image_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestConfig {
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Quotas {
    pub validation_min_pos: usize,
    pub test_base: usize,
    pub test_min_pos: usize,
}

impl Default for Quotas {
    fn default() -> Self {
        Quotas {
            validation_min_pos: 25,
            test_base: 5000,
            test_min_pos: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BootstrapConfig {
    pub n: usize,
    pub level: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { n: 10_000, level: 0.95 }
    }
}

/// Reference the per-finding decision threshold is tuned against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdReference {
    /// Text-derived labels of the validation partition.
    #[default]
    Labels,
    /// The raters of each evaluation matrix.
    Raters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub threshold_reference: ThresholdReference,
    /// Used for findings with no data to tune a threshold on.
    pub fallback_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            threshold_reference: ThresholdReference::Labels,
            fallback_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServeConfig {
    pub addr: String,
    #[serde(serialize_with = "via_str", deserialize_with = "from_str")]
    pub queue_coverage: QueueCoverage,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            addr: "127.0.0.1:8080".into(),
            queue_coverage: QueueCoverage::Single,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 42,
            policy: Policy::FullyCovered,
            partition: PartitionRatios::default(),
            out_dir: PathBuf::from("out"),
            inputs: Inputs::default(),
            ingest: IngestConfig::default(),
            quotas: Quotas::default(),
            bootstrap: BootstrapConfig::default(),
            eval: EvalConfig::default(),
            serve: ServeConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let config: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        config.validate()?;
        Ok(config)
    }

    /// Read a config file and resolve its relative paths against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
        let mut config = Self::parse(&text).map_err(|e| ConfigError::Invalid(path.to_path_buf(), e))?;
        config.resolve(path.parent().unwrap_or(Path::new(".")));
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.bootstrap.n == 0 {
            return Err("bootstrap.n must be positive".into());
        }
        if !(self.bootstrap.level > 0.0 && self.bootstrap.level < 1.0) {
            return Err(format!("bootstrap.level {} not in (0, 1)", self.bootstrap.level));
        }
        if !self.eval.fallback_threshold.is_finite() {
            return Err("eval.fallback_threshold must be finite".into());
        }
        if self.quotas.validation_min_pos == 0 || self.quotas.test_min_pos == 0 {
            return Err("quotas must be positive".into());
        }
        Ok(())
    }

    /// Make every relative path absolute against `base`.
    pub fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.out_dir);
        let i = &mut self.inputs;
        for p in [
            &mut i.reports,
            &mut i.splitter,
            &mut i.rules,
            &mut i.ontology,
            &mut i.tags,
            &mut i.pool,
            &mut i.ratings,
            &mut i.predictions,
            &mut i.labels,
            &mut i.eval_sets,
            &mut i.event_log,
            &mut i.image_dir,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    /// Hex SHA-256 of the effective configuration.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {0}: {1}")]
    Read(PathBuf, #[source] std::io::Error),
    #[error("invalid config {0}: {1}")]
    Invalid(PathBuf, String),
}
