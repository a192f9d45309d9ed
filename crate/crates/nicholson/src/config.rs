//! Run configuration: one JSON document per run, embedding or referencing the model.

use std::fs;
use std::path::{Path, PathBuf};

use nicholson_core::ModelSpec;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::model_json::ModelDoc;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(PathBuf),
    Inline(Box<ModelDoc>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Persistence,
    Dissipativity,
    Attractor,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub size: usize,
    pub low: f64,
    pub high: f64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig { size: 10, low: 0.01, high: 10.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OrbitConfig {
    pub tol: f64,
    pub max_iter: usize,
    /// Constant levels of the initial history grids, one search per level and λ.
    pub initial: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub nodes: Option<usize>,
    pub theta: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { tol: 1e-10, max_iter: 200, initial: vec![1.0], lambdas: vec![1.0], nodes: None, theta: 0.5 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MirandaConfig {
    /// Defaults to `ε₀ / 2`.
    pub eps: Option<f64>,
    /// Defaults to `2 R₀`.
    pub r: Option<f64>,
    pub face_grid: usize,
}

impl Default for MirandaConfig {
    fn default() -> Self {
        MirandaConfig { eps: None, r: None, face_grid: 9 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParameter {
    /// JSON pointer into the model document, e.g. `/species/0/production/0/mean`.
    pub pointer: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepParameter {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        let degenerate = self.count > 1 && self.start == self.stop;
        if self.count == 0 || !(self.stop >= self.start) || degenerate || !self.start.is_finite() {
            return Err(CliError::Config(format!(
                "empty range for {}: [{}, {}] with {} cells",
                self.pointer, self.start, self.stop, self.count
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let width = (self.stop - self.start) / (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + k as f64 * width })
            .collect())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameters: Vec<SweepParameter>,
    #[serde(default = "default_sweep_checks")]
    pub checks: Vec<CheckKind>,
    /// Simulate the ensemble in every cell for tail infimum and `u(horizon)`.
    #[serde(default = "yes")]
    pub simulate: bool,
}

fn default_sweep_checks() -> Vec<CheckKind> {
    vec![CheckKind::Persistence, CheckKind::Attractor]
}

fn default_checks() -> Vec<CheckKind> {
    vec![CheckKind::Persistence, CheckKind::Dissipativity]
}

fn yes() -> bool {
    true
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSource,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to `200 · max(T, τ*)`.
    pub horizon: Option<f64>,
    /// Defaults to `min τ_j / 20`.
    pub step: Option<f64>,
    #[serde(default = "one")]
    pub lambda: f64,
    /// Constant initial history for `simulate`; defaults to all ones.
    pub history: Option<Vec<f64>>,
    #[serde(default = "RunConfig::default_delta")]
    pub delta: f64,
    #[serde(default = "RunConfig::default_grid")]
    pub grid: usize,
    #[serde(default = "RunConfig::default_spot_samples")]
    pub spot_samples: usize,
    #[serde(default = "RunConfig::default_eta")]
    pub eta: f64,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default = "RunConfig::default_transient")]
    pub transient: f64,
    #[serde(default = "RunConfig::default_attraction_tol")]
    pub attraction_tol: f64,
    #[serde(default)]
    pub orbit: OrbitConfig,
    #[serde(default)]
    pub miranda: MirandaConfig,
    #[serde(default = "default_checks")]
    pub checks: Vec<CheckKind>,
    pub sweep: Option<SweepConfig>,
}

impl RunConfig {
    fn default_delta() -> f64 {
        0.25
    }

    fn default_grid() -> usize {
        256
    }

    fn default_spot_samples() -> usize {
        1000
    }

    fn default_eta() -> f64 {
        0.1
    }

    fn default_transient() -> f64 {
        0.5
    }

    fn default_attraction_tol() -> f64 {
        1e-6
    }

    pub fn horizon_for(&self, spec: &ModelSpec) -> f64 {
        self.horizon.unwrap_or(200.0 * spec.period().max(spec.max_delay()))
    }

    pub fn step_for(&self, spec: &ModelSpec) -> f64 {
        self.step.unwrap_or_else(|| spec.delays().iter().copied().fold(f64::INFINITY, f64::min) / 20.0)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("horizon", self.horizon),
            ("step", self.step),
            ("eta", Some(self.eta)),
            ("attraction_tol", Some(self.attraction_tol)),
            ("orbit.tol", Some(self.orbit.tol)),
        ];
        for (name, value) in positive {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(CliError::Config(format!("{name} must be positive, got {v}")));
                }
            }
        }
        if self.ensemble.size == 0 {
            return Err(CliError::Config("ensemble.size must be positive".into()));
        }
        if self.orbit.initial.is_empty() || self.orbit.lambdas.is_empty() {
            return Err(CliError::Config("orbit.initial and orbit.lambdas must be non-empty".into()));
        }
        Ok(())
    }
}

/// A parsed configuration with its model resolved and hashed.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    /// The model document as JSON, the target of sweep pointers.
    pub model_doc: serde_json::Value,
    pub spec: ModelSpec,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    let config: RunConfig = serde_json::from_slice(&bytes)?;
    config.validate()?;
    let model_doc = match &config.model {
        ModelSource::Inline(doc) => serde_json::to_value(doc.as_ref())?,
        ModelSource::Path(rel) => {
            let full = path.parent().unwrap_or(Path::new(".")).join(rel);
            let model_bytes = fs::read(&full).map_err(|e| CliError::io(&full, e))?;
            hasher.update(&model_bytes);
            serde_json::from_slice(&model_bytes)?
        }
    };
    let spec = spec_from_value(&model_doc)?;
    Ok(Loaded { config, model_doc, spec, sha256: hex::encode(hasher.finalize()) })
}

pub fn spec_from_value(value: &serde_json::Value) -> Result<ModelSpec, CliError> {
    let doc: ModelDoc = serde_json::from_value(value.clone())?;
    doc.to_spec()
}
