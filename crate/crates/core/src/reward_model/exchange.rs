//! Model-exchange JSON:
//!
//! ```json
//! {"grid": [[0.0], [1.0]], "labels": ["a", "b"], "sigma": 2.0,
//!  "arms": [{"label": "arm 1", "means": [0.0, 1.0]}],
//!  "pools": {"0:0": [4.0, 5.0]}}
//! ```
//!
//! `labels` and `pools` are optional; `pools` keys are `"<theta index>:<arm>"`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{RewardModel, ThetaGrid};
use crate::environment::EmpiricalPool;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub grid: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub sigma: f64,
    pub arms: Vec<ArmDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pools: Option<BTreeMap<String, Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmDocument {
    pub label: String,
    pub means: Vec<f64>,
}

impl ModelDocument {
    pub fn from_model(model: &RewardModel) -> Self {
        ModelDocument {
            grid: model.grid().points().to_vec(),
            labels: model.grid().labels().map(<[String]>::to_vec),
            sigma: model.sigma(),
            arms: model
                .arm_labels()
                .iter()
                .zip(model.means())
                .map(|(label, means)| ArmDocument {
                    label: label.clone(),
                    means: means.clone(),
                })
                .collect(),
            pools: None,
        }
    }

    pub fn with_pool(mut self, pool: &EmpiricalPool) -> Self {
        let mut map = BTreeMap::new();
        for (theta, arm, samples) in pool.cells() {
            if !samples.is_empty() {
                map.insert(format!("{theta}:{arm}"), samples.to_vec());
            }
        }
        self.pools = Some(map);
        self
    }

    pub fn to_model(&self) -> Result<RewardModel> {
        let grid = ThetaGrid::with_labels(self.grid.clone(), self.labels.clone())?;
        let (labels, means) = self.arms.iter().map(|a| (a.label.clone(), a.means.clone())).unzip();
        RewardModel::from_table_labeled(grid, means, self.sigma, labels)
    }

    /// Build the empirical pool, using the model means as per-cell fallbacks.
    pub fn to_pool(&self, model: &RewardModel) -> Result<Option<EmpiricalPool>> {
        let Some(pools) = &self.pools else {
            return Ok(None);
        };
        let n = model.grid().len();
        let k = model.num_arms();
        let mut samples = vec![vec![Vec::new(); k]; n];
        for (key, values) in pools {
            let (theta, arm) = parse_cell_key(key, n, k)?;
            samples[theta][arm] = values.clone();
        }
        let fallback = (0..n)
            .map(|j| (0..k).map(|a| Some(model.evaluate(a, j))).collect())
            .collect();
        EmpiricalPool::new(samples, fallback).map(Some)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model document serializes")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }
}

fn parse_cell_key(key: &str, n: usize, k: usize) -> Result<(usize, usize)> {
    let bad = || Error::config("pools", format!("bad cell key `{key}`"));
    let (t, a) = key.split_once(':').ok_or_else(bad)?;
    let theta: usize = t.trim().parse().map_err(|_| bad())?;
    let arm: usize = a.trim().parse().map_err(|_| bad())?;
    if theta >= n || arm >= k {
        return Err(bad());
    }
    Ok((theta, arm))
}

/// Parse a model-exchange document and build the model in one step.
pub fn parse_model(text: &str) -> Result<RewardModel> {
    ModelDocument::from_json(text)?.to_model()
}
