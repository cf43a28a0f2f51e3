//! Config loading and the provenance block at the top of every output.

use std::collections::BTreeMap;
use std::path::Path;

use hetcoop::model::{defaults, ConfigError, Origin, ScenarioConfig, ValidatedScenario, CONFIG_KEYS};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const TOOL: &str = concat!("hetcoop ", env!("CARGO_PKG_VERSION"));

/// A scenario config plus where each of its values came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub cfg: ScenarioConfig,
    origins: BTreeMap<&'static str, Origin>,
    /// Config file path, or the preset name.
    pub source: String,
}

impl Loaded {
    /// Reads a TOML config (JSON when the extension is `.json`). No path means
    /// all defaults.
    pub fn from_path(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::tagged(ScenarioConfig::default(), &[], "defaults"));
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: ScenarioConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        let origins = CONFIG_KEYS
            .iter()
            .map(|&k| (k, if cfg.is_set(k) { Origin::Config } else { Origin::Default }))
            .collect();
        Ok(Self { cfg, origins, source: path.display().to_string() })
    }

    /// A built-in preset: `paper_keys` are tagged `paper`, everything else
    /// `default`.
    pub fn tagged(cfg: ScenarioConfig, paper_keys: &[&str], source: &str) -> Self {
        let origins = CONFIG_KEYS
            .iter()
            .map(|&k| (k, if paper_keys.contains(&k) { Origin::Paper } else { Origin::Default }))
            .collect();
        Self { cfg, origins, source: source.to_string() }
    }

    pub fn origin(&self, key: &str) -> Origin {
        self.origins.get(key).copied().unwrap_or(Origin::Default)
    }

    pub fn resolve(&self) -> Result<ValidatedScenario, CliError> {
        Ok(self.cfg.resolve()?)
    }

    /// Copy with one scalar key overridden; the key keeps its origin.
    pub fn with_scalar(&self, key: &str, value: f64) -> Result<Self, CliError> {
        let mut next = self.clone();
        next.cfg.set_scalar(key, value).map_err(|e| match e {
            ConfigError::Field { message, .. } => CliError::Config(message),
            other => other.into(),
        })?;
        Ok(next)
    }

    /// Resolved values in config-key order. The density ratio is echoed as
    /// given rather than recomputed from absolute densities.
    pub fn values(&self, s: &ValidatedScenario) -> Vec<(&'static str, f64)> {
        ScenarioConfig::resolved_values(s)
            .into_iter()
            .map(|(k, v)| match k {
                "lambda_s_ratio" => (k, self.cfg.lambda_s_ratio.unwrap_or(defaults::LAMBDA_S_RATIO)),
                _ => (k, v),
            })
            .collect()
    }
}

/// Provenance header.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub command: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub params: Vec<(&'static str, f64, Origin)>,
    pub notes: Vec<String>,
}

impl Provenance {
    pub fn new(command: &str, loaded: &Loaded, s: &ValidatedScenario, seed: Option<u64>) -> Self {
        let params: Vec<(&'static str, f64, Origin)> =
            loaded.values(s).into_iter().map(|(k, v)| (k, v, loaded.origin(k))).collect();
        let mut hasher = Sha256::new();
        for (k, v, _) in &params {
            hasher.update(format!("{k}={v}\n").as_bytes());
        }
        let config_hash = format!("{:x}", hasher.finalize());
        Self { command: command.to_string(), config_hash, seed, params, notes: Vec::new() }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    fn seed_text(&self) -> String {
        self.seed.map_or_else(|| "none".to_string(), |s| s.to_string())
    }

    /// `#`-prefixed CSV comment block.
    pub fn csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# tool: {TOOL}\n"));
        out.push_str(&format!("# command: {}\n", self.command));
        out.push_str(&format!("# config-sha256: {}\n", self.config_hash));
        out.push_str(&format!("# seed: {}\n", self.seed_text()));
        for (k, v, o) in &self.params {
            out.push_str(&format!("# param {k} = {v} [{o}]\n"));
        }
        for n in &self.notes {
            out.push_str(&format!("# note: {n}\n"));
        }
        out
    }

    pub fn json(&self) -> Value {
        let params: Vec<Value> = self
            .params
            .iter()
            .map(|(k, v, o)| json!({ "key": k, "value": v, "origin": o.to_string() }))
            .collect();
        json!({
            "tool": TOOL,
            "command": self.command,
            "config_sha256": self.config_hash,
            "seed": self.seed_text(),
            "parameters": params,
            "notes": self.notes,
        })
    }
}

/// Formats a float for CSV: shortest round-trip representation.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v}")
    }
}
