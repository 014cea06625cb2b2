//! Experiment configuration: the JSON document and its resolved form.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::environment::EmpiricalPool;
use crate::policies::{AlgorithmId, PolicyParams};
use crate::reward_model::exchange::ModelDocument;
use crate::reward_model::{Axis, GapProfile, RewardModel, ThetaGrid};
use crate::{Error, Result};

pub const DEFAULT_RECORD_EVERY: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario_id: String,
    pub model: ModelSource,
    /// Coordinates of the hidden parameter; must coincide with a grid point.
    pub theta_star: Vec<f64>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub horizon: u64,
    pub runs: usize,
    pub master_seed: u64,
    #[serde(default = "default_record_every")]
    pub record_every: u64,
    #[serde(default)]
    pub environment: EnvironmentKind,
    /// Reward noise of the Gaussian environment; defaults to the model sigma.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_sigma: Option<f64>,
}

fn default_record_every() -> u64 {
    DEFAULT_RECORD_EVERY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelSource {
    /// Path to a model-exchange document, relative to the config file.
    File(PathBuf),
    Inline(ModelDocument),
    Linear(LinearSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSpec {
    pub features: Vec<Vec<f64>>,
    pub grid: GridSpec,
    pub sigma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm_labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum GridSpec {
    Points(Vec<Vec<f64>>),
    /// Cartesian product of axes, first axis varying slowest.
    Axes(Vec<Axis>),
}

impl GridSpec {
    pub fn build(&self) -> Result<ThetaGrid> {
        match self {
            GridSpec::Points(p) => ThetaGrid::new(p.clone()),
            GridSpec::Axes(a) => ThetaGrid::from_axes(a),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvironmentKind {
    #[default]
    Gaussian,
    Empirical,
}

/// An algorithm entry: either a bare id string or an object with parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgorithmSpec {
    Id(String),
    Full(AlgorithmEntry),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmEntry {
    pub id: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_d")]
    pub d: f64,
}

fn default_alpha() -> f64 {
    PolicyParams::DEFAULT_ALPHA
}
fn default_beta() -> f64 {
    PolicyParams::DEFAULT_BETA
}
fn default_gamma() -> f64 {
    PolicyParams::DEFAULT_GAMMA
}
fn default_d() -> f64 {
    PolicyParams::DEFAULT_D
}

impl AlgorithmSpec {
    pub fn entry(&self) -> AlgorithmEntry {
        match self {
            AlgorithmSpec::Id(id) => AlgorithmEntry {
                id: id.clone(),
                alpha: default_alpha(),
                beta: default_beta(),
                gamma: default_gamma(),
                d: default_d(),
            },
            AlgorithmSpec::Full(e) => e.clone(),
        }
    }
}

/// Everything a replication needs, validated and with the model built.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub scenario_id: String,
    pub model: RewardModel,
    pub pool: Option<EmpiricalPool>,
    pub theta_star: usize,
    pub gaps: GapProfile,
    pub algorithms: Vec<(AlgorithmId, PolicyParams)>,
    pub horizon: u64,
    pub runs: usize,
    pub master_seed: u64,
    pub record_every: u64,
    pub environment: EnvironmentKind,
    pub noise_sigma: f64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn read(path: &Path) -> Result<(Self, PathBuf)> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_json(&text)?, base))
    }

    /// Validate and build the experiment. Model file paths resolve against `base_dir`.
    pub fn resolve(&self, base_dir: &Path) -> Result<Experiment> {
        self.resolve_inner(base_dir).map_err(|e| match e {
            Error::Scenario { .. } => e,
            e => Error::Scenario {
                scenario: self.scenario_id.clone(),
                source: Box::new(e),
            },
        })
    }

    fn resolve_inner(&self, base_dir: &Path) -> Result<Experiment> {
        if self.scenario_id.trim().is_empty() {
            return Err(Error::config("scenario_id", "must be non-empty"));
        }
        let (model, document) = match &self.model {
            ModelSource::File(p) => {
                let path = base_dir.join(p);
                let doc = ModelDocument::read(&path)?;
                (doc.to_model()?, Some(doc))
            }
            ModelSource::Inline(doc) => (doc.to_model()?, Some(doc.clone())),
            ModelSource::Linear(spec) => {
                let grid = spec.grid.build()?;
                let m = RewardModel::linear(&spec.features, grid, spec.sigma)?;
                let m = match &spec.arm_labels {
                    Some(labels) => RewardModel::from_table_labeled(
                        m.grid().clone(),
                        m.means().to_vec(),
                        m.sigma(),
                        labels.clone(),
                    )?,
                    None => m,
                };
                (m, None)
            }
        };
        let theta_star = model.grid().locate(&self.theta_star)?;
        let gaps = model.gap_profile(theta_star)?;
        let k = model.num_arms() as u64;

        if self.algorithms.is_empty() {
            return Err(Error::config("algorithms", "at least one algorithm is required"));
        }
        let mut algorithms = Vec::with_capacity(self.algorithms.len());
        for spec in &self.algorithms {
            let e = spec.entry();
            let id: AlgorithmId = e.id.parse()?;
            if algorithms.iter().any(|(other, _)| *other == id) {
                return Err(Error::config("algorithms", format!("`{id}` listed twice")));
            }
            let params = PolicyParams::for_algorithm(id, e.alpha, e.beta, e.gamma, e.d)
                .map_err(|err| prefix_field(err, &e.id))?;
            algorithms.push((id, params));
        }
        if self.horizon < k {
            return Err(Error::config(
                "horizon",
                format!("must be at least the number of arms ({k}), got {}", self.horizon),
            ));
        }
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.record_every == 0 || self.record_every > self.horizon {
            return Err(Error::config(
                "record_every",
                format!("must be in 1..={}, got {}", self.horizon, self.record_every),
            ));
        }
        let noise_sigma = self.noise_sigma.unwrap_or(model.sigma());
        if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
            return Err(Error::config(
                "noise_sigma",
                format!("must be positive, got {noise_sigma}"),
            ));
        }
        let pool = match self.environment {
            EnvironmentKind::Gaussian => None,
            EnvironmentKind::Empirical => {
                let pool = document
                    .as_ref()
                    .map(|d| d.to_pool(&model))
                    .transpose()?
                    .flatten()
                    .ok_or_else(|| Error::config("environment", "empirical environment needs a model with `pools`"))?;
                Some(pool)
            }
        };
        Ok(Experiment {
            scenario_id: self.scenario_id.clone(),
            model,
            pool,
            theta_star,
            gaps,
            algorithms,
            horizon: self.horizon,
            runs: self.runs,
            master_seed: self.master_seed,
            record_every: self.record_every,
            environment: self.environment,
            noise_sigma,
        })
    }
}

fn prefix_field(err: Error, id: &str) -> Error {
    match err {
        Error::InvalidConfig { field, message } => Error::InvalidConfig {
            field: format!("algorithms[{id}].{field}"),
            message,
        },
        e => e,
    }
}
