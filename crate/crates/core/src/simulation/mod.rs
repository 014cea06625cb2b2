//! Replication loop, parallel runner and aggregation.

mod config;
mod output;
pub mod seed;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::confidence::ArmStatistics;
use crate::environment::{gaussian_draw, GaussianEnvironment};
use crate::policies::{choose_arm, AlgorithmId, PolicyParams};
use crate::{Error, Result};

pub use config::{
    AlgorithmEntry, AlgorithmSpec, EnvironmentKind, Experiment, ExperimentConfig, GridSpec, LinearSpec, ModelSource,
    DEFAULT_RECORD_EVERY,
};
pub use output::{write_outputs, write_pulls, write_summary, write_trace, PULLS_FILE, SUMMARY_FILE, TRACE_FILE};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub t: u64,
    pub cum_regret: f64,
    pub pulls: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunTrace {
    pub algorithm: AlgorithmId,
    pub run: usize,
    pub checkpoints: Vec<Checkpoint>,
}

impl RunTrace {
    pub fn last(&self) -> &Checkpoint {
        self.checkpoints.last().expect("trace has a final checkpoint")
    }

    /// Checkpoint recorded at exactly `t`, if any.
    pub fn at(&self, t: u64) -> Option<&Checkpoint> {
        self.checkpoints
            .binary_search_by_key(&t, |c| c.t)
            .ok()
            .map(|i| &self.checkpoints[i])
    }
}

/// A single replication advanced one round at a time.
pub struct Replication<'a> {
    experiment: &'a Experiment,
    algorithm: AlgorithmId,
    params: PolicyParams,
    stats: ArmStatistics,
    policy_rng: ChaCha8Rng,
    reward_rngs: Vec<ChaCha8Rng>,
    gaussian: Option<GaussianEnvironment<'a>>,
}

impl<'a> Replication<'a> {
    pub fn new(experiment: &'a Experiment, algorithm: AlgorithmId, params: PolicyParams, run: usize) -> Result<Self> {
        let k = experiment.model.num_arms();
        let name = algorithm.to_string();
        let sid = experiment.scenario_id.as_str();
        let seed = experiment.master_seed;
        let gaussian = match (&experiment.pool, experiment.environment) {
            (_, EnvironmentKind::Gaussian) => Some(GaussianEnvironment::new(
                &experiment.model,
                experiment.theta_star,
                experiment.noise_sigma,
            )?),
            (Some(_), EnvironmentKind::Empirical) => None,
            (None, EnvironmentKind::Empirical) => {
                return Err(Error::config("environment", "empirical environment has no pool"))
            }
        };
        Ok(Replication {
            experiment,
            algorithm,
            params,
            stats: ArmStatistics::new(k),
            policy_rng: seed::rng_from(seed::policy_seed(seed, sid, &name, run as u64)),
            reward_rngs: (0..k)
                .map(|a| seed::rng_from(seed::reward_seed(seed, sid, run as u64, a as u64)))
                .collect(),
            gaussian,
        })
    }

    pub fn stats(&self) -> &ArmStatistics {
        &self.stats
    }

    /// Play round `t = stats.t() + 1` and return the arm pulled.
    pub fn step(&mut self) -> usize {
        let k = self.experiment.model.num_arms();
        let t = self.stats.t() + 1;
        let arm = if t as usize <= k {
            (t - 1) as usize
        } else {
            choose_arm(
                self.algorithm,
                &self.experiment.model,
                &self.stats,
                &self.params,
                &mut self.policy_rng,
            )
        };
        let rng = &mut self.reward_rngs[arm];
        let reward = match (&self.gaussian, &self.experiment.pool) {
            (Some(env), _) => gaussian_draw(env, arm, rng),
            (None, Some(pool)) => pool.draw(self.experiment.theta_star, arm, rng),
            (None, None) => unreachable!("checked in Replication::new"),
        };
        self.stats.record(arm, reward);
        arm
    }

    /// `sum_k n_k * Delta_k` for the current counts.
    pub fn cumulative_regret(&self) -> f64 {
        self.stats
            .counts()
            .iter()
            .zip(&self.experiment.gaps.gaps)
            .map(|(&n, &gap)| n as f64 * gap)
            .sum()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            t: self.stats.t(),
            cum_regret: self.cumulative_regret(),
            pulls: self.stats.counts().to_vec(),
        }
    }
}

pub fn run_replication(experiment: &Experiment, algorithm: AlgorithmId, run: usize) -> Result<RunTrace> {
    let params = experiment
        .algorithms
        .iter()
        .find(|(id, _)| *id == algorithm)
        .map(|(_, p)| *p)
        .ok_or_else(|| Error::UnknownAlgorithm(algorithm.to_string()))?;
    run_with_params(experiment, algorithm, params, run)
}

fn run_with_params(
    experiment: &Experiment,
    algorithm: AlgorithmId,
    params: PolicyParams,
    run: usize,
) -> Result<RunTrace> {
    let mut rep = Replication::new(experiment, algorithm, params, run)?;
    let horizon = experiment.horizon;
    let stride = experiment.record_every;
    let mut checkpoints = Vec::with_capacity((horizon / stride + 1) as usize);
    for t in 1..=horizon {
        rep.step();
        if t % stride == 0 || t == horizon {
            checkpoints.push(rep.checkpoint());
        }
    }
    Ok(RunTrace {
        algorithm,
        run,
        checkpoints,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: AlgorithmId,
    pub t: u64,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub n_runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullsRow {
    pub algorithm: AlgorithmId,
    pub arm: usize,
    pub mean_pulls_at_t: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub scenario_id: String,
    pub num_arms: usize,
    pub traces: Vec<RunTrace>,
    pub summary: Vec<SummaryRow>,
    pub pulls: Vec<PullsRow>,
}

impl ExperimentResult {
    pub fn traces_for(&self, algorithm: AlgorithmId) -> impl Iterator<Item = &RunTrace> {
        self.traces.iter().filter(move |t| t.algorithm == algorithm)
    }

    pub fn summary_at(&self, algorithm: AlgorithmId, t: u64) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.algorithm == algorithm && r.t == t)
    }

    /// Mean over runs of the pulls of `arm` at checkpoint `t`.
    pub fn mean_pulls_at(&self, algorithm: AlgorithmId, arm: usize, t: u64) -> Option<f64> {
        let values: Option<Vec<f64>> = self
            .traces_for(algorithm)
            .map(|tr| tr.at(t).map(|c| c.pulls[arm] as f64))
            .collect();
        values.filter(|v| !v.is_empty()).map(|v| mean(&v))
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation; zero for fewer than two values.
pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Run every (algorithm, run) pair. `threads = None` uses the global rayon
/// pool; the result does not depend on the thread count.
pub fn run_experiment(experiment: &Experiment, threads: Option<usize>) -> Result<ExperimentResult> {
    let jobs: Vec<(usize, usize)> = (0..experiment.algorithms.len())
        .flat_map(|a| (0..experiment.runs).map(move |r| (a, r)))
        .collect();
    let work = || -> Result<Vec<RunTrace>> {
        jobs.par_iter()
            .map(|&(a, r)| {
                let (id, params) = experiment.algorithms[a];
                run_with_params(experiment, id, params, r)
            })
            .collect()
    };
    let traces = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(work),
        None => work(),
    }
    .map_err(|e| Error::Scenario {
        scenario: experiment.scenario_id.clone(),
        source: Box::new(e),
    })?;
    Ok(aggregate(experiment, traces))
}

pub fn aggregate(experiment: &Experiment, mut traces: Vec<RunTrace>) -> ExperimentResult {
    let order = |id: AlgorithmId| experiment.algorithms.iter().position(|(a, _)| *a == id);
    traces.sort_by_key(|t| (order(t.algorithm), t.run));
    let k = experiment.model.num_arms();
    let mut summary = Vec::new();
    let mut pulls = Vec::new();
    for &(id, _) in &experiment.algorithms {
        let group: Vec<&RunTrace> = traces.iter().filter(|t| t.algorithm == id).collect();
        let Some(first) = group.first() else { continue };
        for (i, cp) in first.checkpoints.iter().enumerate() {
            let values: Vec<f64> = group.iter().map(|t| t.checkpoints[i].cum_regret).collect();
            summary.push(SummaryRow {
                algorithm: id,
                t: cp.t,
                mean_regret: mean(&values),
                std_regret: sample_std(&values),
                n_runs: values.len(),
            });
        }
        for arm in 0..k {
            let values: Vec<f64> = group.iter().map(|t| t.last().pulls[arm] as f64).collect();
            pulls.push(PullsRow {
                algorithm: id,
                arm,
                mean_pulls_at_t: mean(&values),
            });
        }
    }
    ExperimentResult {
        scenario_id: experiment.scenario_id.clone(),
        num_arms: k,
        traces,
        summary,
        pulls,
    }
}
