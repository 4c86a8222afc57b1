//! TOML experiment configuration.
//!
//! Units live in the key names (`bandwidth_hz`, `backhaul_latency_s`, ...).
//! Unknown keys are rejected at every level.

use std::env;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{CacheEntry, CacheStore, EntryId, FeatureVector, SimilarityMetric};
use crate::channel::ChannelParams;
use crate::error::ModelError;
use crate::offload::{NodeProfile, TaskSpec};
use crate::sim::{Engine, FixedLink, Mode, Scenario, WorkloadSpec};

/// Directory searched for relative config paths that do not exist as given.
pub const CONFIG_DIR_ENV: &str = "COCACO_CONFIG_DIR";

pub const DEFAULT_PRECISION: usize = 9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("invalid config: {0}")]
    Parse(String),

    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

impl From<ModelError> for ConfigError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Domain { param, reason } => ConfigError::Invalid {
                field: param.to_string(),
                message: reason,
            },
            other => ConfigError::Invalid {
                field: "features".to_string(),
                message: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub engine: Engine,
    pub n_users: usize,
    pub tasks_per_user: usize,
    pub cache_capacity: usize,
    #[serde(default)]
    pub metric: SimilarityMetric,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub trace_cache: bool,
    /// Significant digits for floating-point CSV fields.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_precision() -> usize {
    DEFAULT_PRECISION
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self {
            path: None,
            trace_cache: false,
            precision: DEFAULT_PRECISION,
        }
    }
}

/// A result already sitting in the edge cache before the first request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CachedItem {
    pub id: u64,
    pub features: FeatureVector,
    pub result_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: RunSettings,
    pub channel: ChannelParams,
    pub link: FixedLink,
    pub edge: NodeProfile,
    pub cloud: NodeProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workload: Option<WorkloadSpec>,
    #[serde(default)]
    pub output: OutputOptions,
    /// Single task for the `decide` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<TaskSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cache_entries: Vec<CachedItem>,
}

fn missing(field: &str, message: &str) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.to_string(),
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ConfigFile =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.scenario;
        if s.n_users == 0 {
            return Err(missing("n_users", "must be >= 1"));
        }
        if s.tasks_per_user == 0 {
            return Err(missing("tasks_per_user", "must be >= 1"));
        }
        if s.cache_capacity == 0 {
            return Err(missing("cache_capacity", "must be >= 1"));
        }
        if s.seed > i64::MAX as u64 {
            return Err(missing("seed", "must fit in a signed 64-bit TOML integer"));
        }
        self.channel.validate()?;
        if !(self.link.downlink_rate_bps.is_finite() && self.link.downlink_rate_bps > 0.0) {
            return Err(missing("downlink_rate_bps", "must be finite and > 0"));
        }
        if !(self.link.backhaul_latency_s.is_finite() && self.link.backhaul_latency_s >= 0.0) {
            return Err(missing("backhaul_latency_s", "must be finite and >= 0"));
        }
        self.edge.validate()?;
        self.cloud.validate()?;
        if let Some(w) = &self.workload {
            w.validate()?;
        }
        if let Some(t) = &self.task {
            t.validate()?;
        }
        if !(1..=17).contains(&self.output.precision) {
            return Err(missing("precision", "must lie in 1..=17"));
        }
        self.initial_cache()?;
        Ok(())
    }

    /// Scenario for the `run` and `sweep` commands.
    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let workload = self
            .workload
            .clone()
            .ok_or_else(|| missing("workload", "section [workload] is required"))?;
        let s = &self.scenario;
        let sc = Scenario {
            mode: s.mode,
            engine: s.engine,
            n_users: s.n_users,
            tasks_per_user: s.tasks_per_user,
            channel: self.channel,
            link: self.link,
            edge: self.edge,
            cloud: self.cloud,
            cache_capacity: s.cache_capacity,
            metric: s.metric,
            workload,
            seed: s.seed,
        };
        sc.validate()?;
        Ok(sc)
    }

    /// Cache store pre-filled with `cache_entries`, in file order.
    pub fn initial_cache(&self) -> Result<CacheStore, ConfigError> {
        let mut store = CacheStore::new(self.scenario.cache_capacity, self.scenario.metric)?;
        for item in &self.cache_entries {
            store
                .insert(CacheEntry::new(
                    EntryId(item.id),
                    item.features.clone(),
                    item.result_bits,
                ))
                .map_err(|e| ConfigError::Invalid {
                    field: "cache_entries".to_string(),
                    message: e.to_string(),
                })?;
        }
        Ok(store)
    }
}

/// Resolves a config path; relative paths that do not exist are retried
/// under `$COCACO_CONFIG_DIR`.
pub fn resolve_path(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = env::var_os(CONFIG_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

pub fn load(path: &Path) -> Result<ConfigFile, ConfigError> {
    let path = resolve_path(path);
    let text = fs::read_to_string(&path).map_err(|source| ConfigError::Io { path, source })?;
    ConfigFile::parse(&text)
}
