//! Reward sources for a fixed hidden parameter.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::reward_model::{check_index, RewardModel};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct GaussianEnvironment<'a> {
    model: &'a RewardModel,
    theta_star: usize,
    noise_sigma: f64,
}

impl<'a> GaussianEnvironment<'a> {
    pub fn new(model: &'a RewardModel, theta_star: usize, noise_sigma: f64) -> Result<Self> {
        check_index("theta_star", theta_star, model.grid().len())?;
        if !(noise_sigma > 0.0 && noise_sigma.is_finite()) {
            return Err(Error::InvalidSigma(noise_sigma));
        }
        Ok(GaussianEnvironment {
            model,
            theta_star,
            noise_sigma,
        })
    }

    pub fn theta_star(&self) -> usize {
        self.theta_star
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.model.evaluate(arm, self.theta_star)
    }
}

/// `mu_arm(theta*) + noise_sigma * z` with exactly one standard normal `z`.
pub fn gaussian_draw<R: Rng + ?Sized>(env: &GaussianEnvironment<'_>, arm: usize, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    env.mean(arm) + env.noise_sigma * z
}

/// Replay samples per `(theta, arm)` cell, with a fallback mean for empty cells.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalPool {
    samples: Vec<Vec<Vec<f64>>>,
    fallback: Vec<Vec<Option<f64>>>,
}

impl EmpiricalPool {
    /// Both tables are indexed `[theta][arm]`.
    pub fn new(samples: Vec<Vec<Vec<f64>>>, fallback: Vec<Vec<Option<f64>>>) -> Result<Self> {
        if samples.len() != fallback.len() {
            return Err(Error::DimensionMismatch {
                what: "pool theta count",
                expected: samples.len(),
                found: fallback.len(),
            });
        }
        let k = samples.first().map_or(0, Vec::len);
        for (theta, (cells, fb)) in samples.iter().zip(&fallback).enumerate() {
            if cells.len() != k || fb.len() != k {
                return Err(Error::DimensionMismatch {
                    what: "pool arm count",
                    expected: k,
                    found: if cells.len() != k { cells.len() } else { fb.len() },
                });
            }
            for (arm, (cell, mean)) in cells.iter().zip(fb).enumerate() {
                if let Some(col) = cell.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite {
                        what: "pool sample",
                        row: theta,
                        col,
                    });
                }
                let fallback_ok = mean.is_some_and(f64::is_finite);
                if cell.is_empty() && !fallback_ok {
                    return Err(Error::EmptyPoolCell { theta, arm });
                }
            }
        }
        Ok(EmpiricalPool { samples, fallback })
    }

    pub fn num_thetas(&self) -> usize {
        self.samples.len()
    }

    pub fn num_arms(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn samples(&self, theta: usize, arm: usize) -> &[f64] {
        &self.samples[theta][arm]
    }

    pub fn fallback_mean(&self, theta: usize, arm: usize) -> Option<f64> {
        self.fallback[theta][arm]
    }

    /// `(theta, arm, samples)` for every cell, theta-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        self.samples
            .iter()
            .enumerate()
            .flat_map(|(j, row)| row.iter().enumerate().map(move |(k, s)| (j, k, s.as_slice())))
    }

    /// Uniform draw with replacement; an empty cell returns its fallback mean
    /// without touching `rng`.
    pub fn draw<R: Rng + ?Sized>(&self, theta_star: usize, arm: usize, rng: &mut R) -> f64 {
        let cell = &self.samples[theta_star][arm];
        if cell.is_empty() {
            return self.fallback[theta_star][arm].expect("validated at construction");
        }
        cell[rng.random_range(0..cell.len())]
    }
}

pub fn empirical_draw<R: Rng + ?Sized>(pool: &EmpiricalPool, theta_star: usize, arm: usize, rng: &mut R) -> f64 {
    pool.draw(theta_star, arm, rng)
}
