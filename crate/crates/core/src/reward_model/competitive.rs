use serde::Serialize;

use super::{check_index, GapProfile, RewardModel};
use crate::Result;

/// Default tolerance for membership in `Theta*` and for "attains the max".
pub const DEFAULT_TOL: f64 = 1e-9;

/// Asymptotic competitiveness of every arm for a fixed true parameter.
///
/// On a finite grid the asymptotic count and its `Theta*`-only variant
/// coincide, so a single `count` is reported.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompetitiveAnalysis {
    /// Grid indices where the optimal arm's mean equals its value at theta*.
    pub theta_star_set: Vec<usize>,
    pub competitive: Vec<bool>,
    pub count: usize,
    /// Degree of non-competitiveness, `Some` exactly for non-competitive arms.
    /// `f64::INFINITY` when the arm is never optimal anywhere on the grid.
    pub degrees: Vec<Option<f64>>,
    pub gap_profile: GapProfile,
}

impl CompetitiveAnalysis {
    /// Bounded regret is only possible when the optimal arm is the sole competitive arm.
    pub fn bounded_regret_possible(&self) -> bool {
        self.count == 1
    }
}

/// Compute `Theta*`, competitive flags, `C(theta*)` and the degrees `eps_k`.
pub fn competitive_analysis(model: &RewardModel, theta_star: usize, tol: f64) -> Result<CompetitiveAnalysis> {
    check_index("theta_star", theta_star, model.grid().len())?;
    let tol = tol.max(0.0);
    let gap_profile = model.gap_profile(theta_star)?;
    let best = gap_profile.optimal_arm;
    let anchor = model.evaluate(best, theta_star);
    let k = model.num_arms();
    let n = model.grid().len();

    let distance: Vec<f64> = (0..n).map(|j| (anchor - model.evaluate(best, j)).abs()).collect();
    let column_max: Vec<f64> = (0..n)
        .map(|j| (0..k).map(|a| model.evaluate(a, j)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let attains_max = |arm: usize, j: usize| model.evaluate(arm, j) >= column_max[j] - tol;

    let theta_star_set: Vec<usize> = (0..n).filter(|&j| distance[j] <= tol).collect();
    let competitive: Vec<bool> = (0..k)
        .map(|arm| arm == best || theta_star_set.iter().any(|&j| attains_max(arm, j)))
        .collect();

    // Theta*(eps) grows with eps, so the arm stays sub-optimal exactly up to
    // the distance of the nearest grid point where it attains the max.
    let degrees = competitive
        .iter()
        .enumerate()
        .map(|(arm, &is_comp)| {
            (!is_comp).then(|| {
                (0..n)
                    .filter(|&j| attains_max(arm, j))
                    .map(|j| distance[j])
                    .fold(f64::INFINITY, f64::min)
            })
        })
        .collect();

    let count = competitive.iter().filter(|&&c| c).count();
    Ok(CompetitiveAnalysis {
        theta_star_set,
        competitive,
        count,
        degrees,
        gap_profile,
    })
}
