//! Confidence set over the parameter grid and the set of arms that are
//! optimal somewhere inside it.

use crate::reward_model::RewardModel;

/// Pull counts and empirical means per arm: the only state a policy reads.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStatistics {
    counts: Vec<u64>,
    sums: Vec<f64>,
    means: Vec<f64>,
    t: u64,
}

impl ArmStatistics {
    pub fn new(num_arms: usize) -> Self {
        ArmStatistics {
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            means: vec![f64::NAN; num_arms],
            t: 0,
        }
    }

    /// Statistics assembled directly from counts and means, used for
    /// what-if evaluation of the set operations. `t` is not required to
    /// equal the sum of the counts. Means of unpulled arms are ignored.
    pub fn synthetic(counts: Vec<u64>, means: Vec<f64>, t: u64) -> Self {
        assert_eq!(counts.len(), means.len(), "counts and means differ in length");
        let means: Vec<f64> = counts
            .iter()
            .zip(means)
            .map(|(&n, m)| if n == 0 { f64::NAN } else { m })
            .collect();
        let sums = counts
            .iter()
            .zip(&means)
            .map(|(&n, &m)| if n == 0 { 0.0 } else { m * n as f64 })
            .collect();
        ArmStatistics { counts, sums, means, t }
    }

    pub fn record(&mut self, arm: usize, reward: f64) {
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        self.means[arm] = self.sums[arm] / self.counts[arm] as f64;
        self.t += 1;
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    /// Empirical mean, NaN for an unpulled arm.
    #[inline]
    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    pub fn t(&self) -> u64 {
        self.t
    }
}

/// Grid indices consistent with every pulled arm's empirical mean.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfidenceSet {
    pub members: Vec<usize>,
    pub t: u64,
    pub empty_fallback_triggered: bool,
}

impl ConfidenceSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members, or the whole grid when the set is empty.
    pub fn members_or_all(&self, grid_len: usize) -> std::borrow::Cow<'_, [usize]> {
        if self.members.is_empty() {
            std::borrow::Cow::Owned((0..grid_len).collect())
        } else {
            std::borrow::Cow::Borrowed(&self.members)
        }
    }
}

/// Arms that attain the maximum at some member of the confidence set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetitiveSet {
    arms: Vec<usize>,
}

impl CompetitiveSet {
    pub fn all(num_arms: usize) -> Self {
        CompetitiveSet {
            arms: (0..num_arms).collect(),
        }
    }

    /// Ascending, non-empty arm list.
    pub fn from_arms(mut arms: Vec<usize>) -> Self {
        assert!(!arms.is_empty(), "competitive set must be non-empty");
        arms.sort_unstable();
        arms.dedup();
        CompetitiveSet { arms }
    }

    pub fn arms(&self) -> &[usize] {
        &self.arms
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.arms.binary_search(&arm).is_ok()
    }
}

/// `sqrt(2 alpha sigma^2 ln(t) / n)`; zero at `t = 1`.
#[inline]
pub fn confidence_radius(n: u64, t: u64, alpha: f64, sigma: f64) -> f64 {
    debug_assert!(n >= 1 && t >= 1);
    (2.0 * alpha * sigma * sigma * (t as f64).ln() / n as f64).sqrt()
}

/// Build the confidence set for round `stats.t()`.
///
/// A grid point is a member iff `|mu_k(theta) - mean_k| < radius_k` for every
/// pulled arm. Unpulled arms impose no constraint.
pub fn build_confidence_set(model: &RewardModel, stats: &ArmStatistics, alpha: f64) -> ConfidenceSet {
    let t = stats.t();
    debug_assert!(t >= 1);
    let sigma = model.sigma();
    let constraints: Vec<(usize, f64, f64)> = (0..model.num_arms())
        .filter(|&k| stats.count(k) > 0)
        .map(|k| (k, stats.mean(k), confidence_radius(stats.count(k), t, alpha, sigma)))
        .collect();

    let inside = |j: usize| {
        constraints
            .iter()
            .all(|&(k, mean, r)| (model.evaluate(k, j) - mean).abs() < r)
    };

    let members: Vec<usize> = match constraints.iter().min_by(|a, b| a.2.total_cmp(&b.2)) {
        None => (0..model.grid().len()).collect(),
        Some(&(k, mean, r)) => {
            // Narrow down with the tightest arm, then apply the exact test.
            let order = model.sorted_indices(k);
            let slack = 1e-9 * (1.0 + mean.abs() + r);
            let lo = order.partition_point(|&j| model.evaluate(k, j) < mean - r - slack);
            let hi = order.partition_point(|&j| model.evaluate(k, j) <= mean + r + slack);
            let mut m: Vec<usize> = order[lo..hi].iter().copied().filter(|&j| inside(j)).collect();
            m.sort_unstable();
            m
        }
    };

    let empty_fallback_triggered = members.is_empty();
    ConfidenceSet {
        members,
        t,
        empty_fallback_triggered,
    }
}

/// Arms that are an exact argmax at some confidence-set member; all arms
/// when the confidence set is empty.
pub fn competitive_arms(model: &RewardModel, conf: &ConfidenceSet) -> CompetitiveSet {
    let k = model.num_arms();
    if conf.empty_fallback_triggered || conf.members.is_empty() {
        return CompetitiveSet::all(k);
    }
    let mut flags = vec![false; k];
    let mut found = 0;
    for &j in &conf.members {
        for &arm in model.optimal_arms_at(j) {
            if !flags[arm] {
                flags[arm] = true;
                found += 1;
            }
        }
        if found == k {
            break;
        }
    }
    CompetitiveSet {
        arms: (0..k).filter(|&a| flags[a]).collect(),
    }
}
