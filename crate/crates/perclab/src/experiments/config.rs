//! Experiment configuration: a single JSON document, with CLI flags
//! layered on top by the binary. Unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

/// Named scalar parameters. Which ones are required depends on the
/// experiment; validation reports the offending key.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replicas: Option<u64>,
}

impl Params {
    pub fn require_n(&self) -> Result<u64> {
        self.n.ok_or_else(|| Error::Config("missing parameter `n`".into()))
    }
    pub fn require_k(&self) -> Result<u64> {
        self.k.ok_or_else(|| Error::Config("missing parameter `k`".into()))
    }
    pub fn require_h(&self) -> Result<u64> {
        self.h.ok_or_else(|| Error::Config("missing parameter `h`".into()))
    }
    pub fn require_c(&self) -> Result<f64> {
        self.c.ok_or_else(|| Error::Config("missing parameter `c`".into()))
    }
    pub fn require_p(&self) -> Result<f64> {
        self.p.ok_or_else(|| Error::Config("missing parameter `p`".into()))
    }
    pub fn require_m(&self) -> Result<f64> {
        self.m.ok_or_else(|| Error::Config("missing parameter `m`".into()))
    }
    pub fn require_steps(&self) -> Result<u64> {
        self.steps
            .ok_or_else(|| Error::Config("missing parameter `steps`".into()))
    }
    pub fn d_or_default(&self) -> u32 {
        self.d.unwrap_or(2)
    }
    pub fn t_or_default(&self) -> f64 {
        self.t.unwrap_or(1.0)
    }
    pub fn replicas_or(&self, default: u64) -> u64 {
        self.replicas.unwrap_or(default)
    }
}

/// One experiment invocation: everything the runner needs to reproduce a
/// sample set byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Name tag; one of [`crate::experiments::experiment_names`] or a CLI
    /// subcommand.
    pub experiment: String,
    #[serde(default)]
    pub params: Params,
    pub seed: u64,
    /// Worker threads for replica execution; `None` uses all cores.
    /// Results do not depend on it, so it is an execution resource rather
    /// than part of the experiment identity: accepted from config files
    /// but never echoed into reports.
    #[serde(skip_serializing, default)]
    pub workers: Option<usize>,
    /// Destination and format are delivery details, like `workers`:
    /// accepted from config files but not echoed into reports, so reports
    /// written to different paths stay byte-comparable.
    #[serde(skip_serializing, default)]
    pub out: Option<String>,
    #[serde(skip_serializing, default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(experiment: impl Into<String>, seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            experiment: experiment.into(),
            params: Params::default(),
            seed,
            workers: None,
            out: None,
            format: OutputFormat::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("bad config document: {e}")))?;
        if cfg.params.replicas == Some(0) {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips() {
        let mut cfg = ExperimentConfig::new("germ-clock", 42);
        cfg.params.k = Some(10_000);
        cfg.params.c = Some(1.0);
        cfg.params.replicas = Some(100);
        let text = cfg.to_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"experiment":"x","seed":1,"params":{"n":5,"bogus":2}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
        let text = r#"{"experiment":"x","seed":1,"frobnicate":true}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn zero_replicas_rejected() {
        let text = r#"{"experiment":"x","seed":1,"params":{"replicas":0}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn missing_params_name_the_key() {
        let p = Params::default();
        let err = p.require_n().unwrap_err().to_string();
        assert!(err.contains('n'), "{err}");
    }
}
