use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// One experiment: a model, a measurement schedule and the tables to emit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_steps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<TauSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<OutputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Tolerance on `||λ₀| − 1|` for the first efficiency condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeno: Option<ZenoConfig>,
    pub model: ModelConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TauSpec {
    Value(f64),
    Tuned { tuned: TunedTau },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunedTau {
    pub m: u32,
    pub branch: Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Spectrum,
    Purify,
    Compare,
    Zeno,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZenoConfig {
    pub total_time: f64,
    pub n_values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelConfig {
    Oscillator(OscillatorConfig),
    ExplicitMatrix(ExplicitConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorConfig {
    pub big_omega: f64,
    pub omega: f64,
    pub g: f64,
    /// `[re, im]`.
    pub alpha: [f64; 2],
    pub beta: f64,
    pub n_max_a: usize,
    pub n_max_b: usize,
}

/// A system given by matrix files. Exactly one of `hamiltonian` (with
/// `probe`) or `propagator` must be set. Relative paths are resolved
/// against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub propagator: Option<PathBuf>,
    /// Probe amplitudes as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<Vec<[f64; 2]>>,
    /// Diagonal of the initial state of `B`; normalized on load.
    pub initial_populations: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<[f64; 2]>>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_steps == 0 {
            return Err(CliError::Config("n_steps must be >= 1".into()));
        }
        if let Some(eps) = self.epsilon {
            if !(eps >= 0.0) {
                return Err(CliError::Config(format!("epsilon must be >= 0, got {eps}")));
            }
        }
        if let Some(zeno) = &self.zeno {
            if !(zeno.total_time > 0.0) {
                return Err(CliError::Config("zeno.total_time must be > 0".into()));
            }
            if zeno.n_values.is_empty() || zeno.n_values.contains(&0) {
                return Err(CliError::Config("zeno.n_values must be non-empty and >= 1".into()));
            }
        }
        match (&self.model, self.tau) {
            (_, Some(TauSpec::Value(t))) if !(t >= 0.0) || !t.is_finite() => {
                Err(CliError::Config(format!("tau must be finite and >= 0, got {t}")))
            }
            (_, Some(TauSpec::Tuned { tuned })) if tuned.m == 0 => {
                Err(CliError::Config("tuned.m must be >= 1".into()))
            }
            (ModelConfig::Oscillator(_), None) => Err(CliError::Config("the oscillator model needs tau".into())),
            (ModelConfig::ExplicitMatrix(e), tau) => e.validate(tau),
            _ => Ok(()),
        }
    }
}

impl ExplicitConfig {
    fn validate(&self, tau: Option<TauSpec>) -> Result<(), CliError> {
        match (&self.hamiltonian, &self.propagator) {
            (Some(_), None) => {
                if self.probe.is_none() {
                    return Err(CliError::Config("a hamiltonian needs a probe".into()));
                }
                match tau {
                    Some(TauSpec::Value(_)) => {}
                    Some(TauSpec::Tuned { .. }) => {
                        return Err(CliError::Config("tuned tau applies to the oscillator model only".into()))
                    }
                    None => return Err(CliError::Config("a hamiltonian needs tau".into())),
                }
            }
            (None, Some(_)) => {
                if self.probe.is_some() {
                    return Err(CliError::Config("probe is meaningless with a propagator file".into()));
                }
                if let Some(TauSpec::Tuned { .. }) = tau {
                    return Err(CliError::Config("tuned tau applies to the oscillator model only".into()));
                }
            }
            _ => {
                return Err(CliError::Config(
                    "exactly one of hamiltonian or propagator must be given".into(),
                ))
            }
        }
        if self.initial_populations.is_empty() {
            return Err(CliError::Config("initial_populations is empty".into()));
        }
        Ok(())
    }
}
