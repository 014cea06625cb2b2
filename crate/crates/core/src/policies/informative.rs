//! Informativeness of arms with respect to the current confidence set.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::confidence::ConfidenceSet;
use crate::reward_model::RewardModel;

/// Resolution used to turn real-valued means into discrete atoms.
pub const ENTROPY_QUANTUM: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Expected Gaussian KL divergence, i.e. the variance of `mu_k` over the set.
    Variance,
    /// Shannon entropy (nats) of the quantized `mu_k` values over the set.
    Entropy,
    /// Uniformly random arm.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InformativenessScores {
    pub scores: Vec<f64>,
}

impl InformativenessScores {
    /// Highest-scoring arm, ties to the lowest index.
    pub fn most_informative(&self) -> usize {
        crate::reward_model::argmax_lowest(&self.scores)
    }
}

/// Score every arm under `theta ~ Uniform(confidence set)`; an empty set is
/// treated as the whole grid.
pub fn informativeness(metric: Metric, model: &RewardModel, conf: &ConfidenceSet) -> InformativenessScores {
    let members = conf.members_or_all(model.grid().len());
    let scores = (0..model.num_arms())
        .map(|k| {
            let values = members.iter().map(|&j| model.evaluate(k, j));
            match metric {
                Metric::Variance => population_variance(values),
                Metric::Entropy => quantized_entropy(values),
                Metric::Random => 0.0,
            }
        })
        .collect();
    InformativenessScores { scores }
}

fn population_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (n, sum) = values.clone().fold((0usize, 0.0), |(n, s), v| (n + 1, s + v));
    if n == 0 {
        return 0.0;
    }
    let mean = sum / n as f64;
    values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64
}

fn quantized_entropy(values: impl Iterator<Item = f64>) -> f64 {
    let mut atoms: HashMap<i64, usize> = HashMap::new();
    let mut n = 0usize;
    for v in values {
        *atoms.entry((v / ENTROPY_QUANTUM).round() as i64).or_default() += 1;
        n += 1;
    }
    let n = n as f64;
    let h: f64 = atoms
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}
