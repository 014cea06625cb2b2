//! Base bandit indices, the Algorithm-C round step, Informative-C and UCB-S.

mod index;
mod informative;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::confidence::{build_confidence_set, competitive_arms, ArmStatistics, CompetitiveSet, ConfidenceSet};
use crate::reward_model::{argmax_lowest, RewardModel};
use crate::{Error, Result};

pub use index::{klucb_exploration, klucb_index, ts_sample, ucb_index};
pub use informative::{informativeness, InformativenessScores, Metric, ENTROPY_QUANTUM};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Base {
    Ucb,
    Ts,
    Klucb,
}

impl Base {
    pub fn as_str(self) -> &'static str {
        match self {
            Base::Ucb => "ucb",
            Base::Ts => "ts",
            Base::Klucb => "klucb",
        }
    }
}

/// Which wrapper, if any, restricts the base algorithm's candidate arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    Classic,
    AlgorithmC,
    Informative(Metric),
    UcbS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgorithmId {
    pub base: Base,
    pub structure: Structure,
}

impl AlgorithmId {
    pub const ALL: [&'static str; 13] = [
        "ucb",
        "ts",
        "klucb",
        "ucb-c",
        "ts-c",
        "klucb-c",
        "ucb-s",
        "ucb-c-kldiv",
        "ucb-c-entropy",
        "ucb-c-random",
        "ts-c-kldiv",
        "ts-c-entropy",
        "ts-c-random",
    ];

    pub fn name(&self) -> String {
        let base = self.base.as_str();
        match self.structure {
            Structure::Classic => base.to_string(),
            Structure::AlgorithmC => format!("{base}-c"),
            Structure::UcbS => "ucb-s".to_string(),
            Structure::Informative(m) => format!(
                "{base}-c-{}",
                match m {
                    Metric::Variance => "kldiv",
                    Metric::Entropy => "entropy",
                    Metric::Random => "random",
                }
            ),
        }
    }

    pub fn uses_rng(&self) -> bool {
        self.base == Base::Ts || matches!(self.structure, Structure::Informative(_))
    }
}

impl fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Serialize for AlgorithmId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (base, structure) = match s {
            "ucb" => (Base::Ucb, Structure::Classic),
            "ts" => (Base::Ts, Structure::Classic),
            "klucb" => (Base::Klucb, Structure::Classic),
            "ucb-c" => (Base::Ucb, Structure::AlgorithmC),
            "ts-c" => (Base::Ts, Structure::AlgorithmC),
            "klucb-c" => (Base::Klucb, Structure::AlgorithmC),
            "ucb-s" => (Base::Ucb, Structure::UcbS),
            "ucb-c-kldiv" => (Base::Ucb, Structure::Informative(Metric::Variance)),
            "ucb-c-entropy" => (Base::Ucb, Structure::Informative(Metric::Entropy)),
            "ucb-c-random" => (Base::Ucb, Structure::Informative(Metric::Random)),
            "ts-c-kldiv" => (Base::Ts, Structure::Informative(Metric::Variance)),
            "ts-c-entropy" => (Base::Ts, Structure::Informative(Metric::Entropy)),
            "ts-c-random" => (Base::Ts, Structure::Informative(Metric::Random)),
            other => return Err(Error::UnknownAlgorithm(other.to_string())),
        };
        Ok(AlgorithmId { base, structure })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformativeParams {
    pub metric: Metric,
    pub gamma: f64,
    pub d: f64,
}

impl InformativeParams {
    /// `min(1, gamma / t^d)`.
    pub fn probability(&self, t: u64) -> f64 {
        (self.gamma / (t as f64).powf(self.d)).min(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub alpha: f64,
    pub beta: f64,
    pub informative: Option<InformativeParams>,
    pub base: Base,
}

impl PolicyParams {
    pub const DEFAULT_ALPHA: f64 = 3.0;
    pub const DEFAULT_BETA: f64 = 1.0;
    pub const DEFAULT_GAMMA: f64 = 30.0;
    pub const DEFAULT_D: f64 = 1.1;

    pub fn new(base: Base, alpha: f64, beta: f64) -> Result<Self> {
        let p = PolicyParams {
            alpha,
            beta,
            informative: None,
            base,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_informative(mut self, metric: Metric, gamma: f64, d: f64) -> Result<Self> {
        self.informative = Some(InformativeParams { metric, gamma, d });
        self.validate()?;
        Ok(self)
    }

    /// Parameters for `id`, with the informative block filled in when `id` needs one.
    pub fn for_algorithm(id: AlgorithmId, alpha: f64, beta: f64, gamma: f64, d: f64) -> Result<Self> {
        let p = PolicyParams::new(id.base, alpha, beta)?;
        match id.structure {
            Structure::Informative(metric) => p.with_informative(metric, gamma, d),
            _ => Ok(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::config("alpha", format!("must be > 2, got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::config("beta", format!("must be > 0, got {}", self.beta)));
        }
        if let Some(inf) = &self.informative {
            if !(inf.gamma > 0.0 && inf.gamma.is_finite()) {
                return Err(Error::config("gamma", format!("must be > 0, got {}", inf.gamma)));
            }
            if !(inf.d > 1.0 && inf.d.is_finite()) {
                return Err(Error::config("d", format!("must be > 1, got {}", inf.d)));
            }
        }
        Ok(())
    }
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
            informative: None,
            base: Base::Ucb,
        }
    }
}

/// Pick among `candidates` with the base algorithm. Unpulled candidates win
/// first; ties go to the lowest arm. TS draws one variate per pulled candidate,
/// in ascending arm order.
pub fn select_with_base<R: Rng + ?Sized>(
    base: Base,
    candidates: &CompetitiveSet,
    stats: &ArmStatistics,
    params: &PolicyParams,
    sigma: f64,
    rng: &mut R,
) -> usize {
    let arms = candidates.arms();
    assert!(!arms.is_empty(), "candidate set must be non-empty");
    if let Some(&unpulled) = arms.iter().find(|&&k| stats.count(k) == 0) {
        return unpulled;
    }
    let t = stats.t();
    let mut best = arms[0];
    let mut best_value = f64::NEG_INFINITY;
    for &k in arms {
        let (mean, n) = (stats.mean(k), stats.count(k));
        let value = match base {
            Base::Ucb => ucb_index(mean, n, t, params.alpha, sigma),
            Base::Klucb => klucb_index(mean, n, t, sigma),
            Base::Ts => ts_sample(mean, n, params.beta, sigma, rng),
        };
        if value > best_value {
            best = k;
            best_value = value;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub arm: usize,
    pub confidence: ConfidenceSet,
    pub competitive: CompetitiveSet,
}

pub fn algorithm_c_step<R: Rng + ?Sized>(
    model: &RewardModel,
    stats: &ArmStatistics,
    params: &PolicyParams,
    rng: &mut R,
) -> Step {
    let confidence = build_confidence_set(model, stats, params.alpha);
    let competitive = competitive_arms(model, &confidence);
    let arm = select_with_base(params.base, &competitive, stats, params, model.sigma(), rng);
    Step {
        arm,
        confidence,
        competitive,
    }
}

/// `argmax_k max_{j in set} mu_k(theta_j)`; an empty set means the full grid.
pub fn ucb_s_step(model: &RewardModel, stats: &ArmStatistics, params: &PolicyParams) -> usize {
    let confidence = build_confidence_set(model, stats, params.alpha);
    ucb_s_choice(model, &confidence)
}

pub fn ucb_s_choice(model: &RewardModel, confidence: &ConfidenceSet) -> usize {
    let members = confidence.members_or_all(model.grid().len());
    let sup: Vec<f64> = (0..model.num_arms())
        .map(|k| {
            members
                .iter()
                .map(|&j| model.evaluate(k, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    argmax_lowest(&sup)
}

/// One uniform decides between the most informative arm (probability
/// `min(1, gamma / t^d)`) and an ordinary Algorithm-C step.
pub fn informative_c_step<R: Rng + ?Sized>(
    model: &RewardModel,
    stats: &ArmStatistics,
    params: &PolicyParams,
    rng: &mut R,
) -> usize {
    let inf = params
        .informative
        .expect("informative_c_step needs informative parameters");
    let u: f64 = rng.random();
    let confidence = build_confidence_set(model, stats, params.alpha);
    if u < inf.probability(stats.t()) {
        return match inf.metric {
            Metric::Random => rng.random_range(0..model.num_arms()),
            metric => informativeness(metric, model, &confidence).most_informative(),
        };
    }
    let competitive = competitive_arms(model, &confidence);
    select_with_base(params.base, &competitive, stats, params, model.sigma(), rng)
}

/// Round `stats.t() + 1` for algorithm `id`, after the round-robin start.
pub fn choose_arm<R: Rng + ?Sized>(
    id: AlgorithmId,
    model: &RewardModel,
    stats: &ArmStatistics,
    params: &PolicyParams,
    rng: &mut R,
) -> usize {
    match id.structure {
        Structure::Classic => {
            let all = CompetitiveSet::all(model.num_arms());
            select_with_base(params.base, &all, stats, params, model.sigma(), rng)
        }
        Structure::AlgorithmC => algorithm_c_step(model, stats, params, rng).arm,
        Structure::UcbS => ucb_s_step(model, stats, params),
        Structure::Informative(_) => informative_c_step(model, stats, params, rng),
    }
}
