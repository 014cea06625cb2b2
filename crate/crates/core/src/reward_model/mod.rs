//! The structured-bandit instance: a finite parameter grid, the table of
//! mean rewards `mu_k(theta)` for every arm, and the offline analyses
//! (gap profile, competitive arms, regret-bound calculators) that depend
//! only on the model and a fixed true parameter.

mod bounds;
mod competitive;
pub mod exchange;

use std::collections::HashMap;

pub use bounds::{theorem_bounds, ArmBound, BoundValue, Bounds, BoundsParams, T_SCAN_CAP};
pub use competitive::{competitive_analysis, CompetitiveAnalysis, DEFAULT_TOL};

use crate::{Error, Result};

/// Decimal places kept when generating grid coordinates from axis ranges.
const AXIS_DECIMALS: i32 = 12;

/// Cap on the size of an axis-generated grid.
pub const MAX_GRID_POINTS: usize = 10_000_000;

/// Ordered, finite set of parameter points. Indices are stable identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaGrid {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

/// One axis of a Cartesian grid: `start, start + step, ...` up to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Axis {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Axis { start, stop, step }
    }

    fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::config("axes", "axis needs finite bounds and step > 0"));
        }
        if self.stop < self.start {
            return Err(Error::config("axes", "axis stop is below start"));
        }
        let span = ((self.stop - self.start) / self.step + 1e-9).floor();
        if span >= MAX_GRID_POINTS as f64 {
            return Err(Error::config(
                "axes",
                format!("axis has more than {MAX_GRID_POINTS} points"),
            ));
        }
        let n = span as usize;
        let scale = 10f64.powi(AXIS_DECIMALS);
        Ok((0..=n)
            .map(|i| ((self.start + i as f64 * self.step) * scale).round() / scale)
            .collect())
    }
}

impl ThetaGrid {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_labels(points, None)
    }

    pub fn with_labels(points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyGrid)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::GridDimension {
                index: 0,
                expected: 1,
                found: 0,
            });
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(points.len());
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::GridDimension {
                    index,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(col) = p.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: "grid",
                    row: index,
                    col,
                });
            }
            // +0.0 and -0.0 are the same point.
            let key: Vec<u64> = p.iter().map(|v| (v + 0.0).to_bits()).collect();
            if let Some(first) = seen.insert(key, index) {
                return Err(Error::DuplicatePoint { first, second: index });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != points.len() {
                return Err(Error::DimensionMismatch {
                    what: "grid labels",
                    expected: points.len(),
                    found: labels.len(),
                });
            }
        }
        Ok(ThetaGrid { points, labels })
    }

    /// Scalar grid from a list of values.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    /// Cartesian product of axes, first axis varying slowest.
    pub fn from_axes(axes: &[Axis]) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let values = axes.iter().map(Axis::values).collect::<Result<Vec<_>>>()?;
        let total = values.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
        if total.is_none_or(|n| n > MAX_GRID_POINTS) {
            return Err(Error::config(
                "axes",
                format!("grid has more than {MAX_GRID_POINTS} points"),
            ));
        }
        let mut points: Vec<Vec<f64>> = vec![Vec::new()];
        for values in &values {
            points = points
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index]
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Index of the grid point within `tol` (max-norm) of `theta`, if any.
    pub fn find(&self, theta: &[f64], tol: f64) -> Option<usize> {
        if theta.len() != self.dim() {
            return None;
        }
        self.points
            .iter()
            .position(|p| p.iter().zip(theta).all(|(a, b)| (a - b).abs() <= tol))
    }

    /// The `n` grid points closest to `theta` in Euclidean distance.
    pub fn nearest(&self, theta: &[f64], n: usize) -> Vec<usize> {
        let mut order: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let d: f64 = p
                    .iter()
                    .zip(theta.iter().chain(std::iter::repeat(&0.0)))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d, i)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        order.into_iter().take(n).map(|(_, i)| i).collect()
    }

    /// Locate `theta` on the grid or fail with the nearest candidates.
    pub fn locate(&self, theta: &[f64]) -> Result<usize> {
        self.find(theta, 1e-9).ok_or_else(|| Error::ThetaNotOnGrid {
            requested: theta.to_vec(),
            nearest: self
                .nearest(theta, 3)
                .into_iter()
                .map(|i| self.points[i].clone())
                .collect(),
        })
    }
}

/// Structured-bandit instance: `means[k][j] = mu_k(theta_j)`.
///
/// Immutable after construction and cheap to share between threads.
#[derive(Debug, Clone)]
pub struct RewardModel {
    grid: ThetaGrid,
    means: Vec<Vec<f64>>,
    sigma: f64,
    arm_labels: Vec<String>,
    /// Arms attaining the exact maximum at each grid point, ascending.
    optimal_at: Vec<Vec<usize>>,
    /// Grid indices sorted by `means[k]`, per arm.
    sorted_by_arm: Vec<Vec<usize>>,
}

impl RewardModel {
    /// Build from an arm-major table (`means.len() == K`, each row `|grid|` long).
    pub fn from_table(grid: ThetaGrid, means: Vec<Vec<f64>>, sigma: f64) -> Result<Self> {
        let labels = (1..=means.len()).map(|k| format!("arm {k}")).collect();
        Self::from_table_labeled(grid, means, sigma, labels)
    }

    pub fn from_table_labeled(
        grid: ThetaGrid,
        means: Vec<Vec<f64>>,
        sigma: f64,
        arm_labels: Vec<String>,
    ) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::DimensionMismatch {
                what: "arms",
                expected: 1,
                found: 0,
            });
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidSigma(sigma));
        }
        if arm_labels.len() != means.len() {
            return Err(Error::DimensionMismatch {
                what: "arm labels",
                expected: means.len(),
                found: arm_labels.len(),
            });
        }
        for (k, row) in means.iter().enumerate() {
            if row.len() != grid.len() {
                return Err(Error::DimensionMismatch {
                    what: "mean table row",
                    expected: grid.len(),
                    found: row.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    what: "mean table",
                    row: k,
                    col: j,
                });
            }
        }

        let optimal_at = (0..grid.len())
            .map(|j| {
                let best = means.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max);
                (0..means.len()).filter(|&k| means[k][j] == best).collect()
            })
            .collect();
        let sorted_by_arm = means
            .iter()
            .map(|row| {
                let mut idx: Vec<usize> = (0..row.len()).collect();
                idx.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
                idx
            })
            .collect();

        Ok(RewardModel {
            grid,
            means,
            sigma,
            arm_labels,
            optimal_at,
            sorted_by_arm,
        })
    }

    /// Linear bandit: `mu_k(theta) = <x_k, theta>`.
    pub fn linear(features: &[Vec<f64>], grid: ThetaGrid, sigma: f64) -> Result<Self> {
        let dim = grid.dim();
        for x in features {
            if x.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "feature vector",
                    expected: dim,
                    found: x.len(),
                });
            }
        }
        let means = features
            .iter()
            .map(|x| {
                grid.points()
                    .iter()
                    .map(|p| x.iter().zip(p).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect();
        Self::from_table(grid, means, sigma)
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn grid(&self) -> &ThetaGrid {
        &self.grid
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn arm_labels(&self) -> &[String] {
        &self.arm_labels
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    #[inline]
    pub fn evaluate(&self, arm: usize, theta: usize) -> f64 {
        self.means[arm][theta]
    }

    /// Arms whose mean equals the maximum at grid point `theta` exactly.
    pub fn optimal_arms_at(&self, theta: usize) -> &[usize] {
        &self.optimal_at[theta]
    }

    /// Grid indices ordered by `mu_arm`, ascending.
    pub(crate) fn sorted_indices(&self, arm: usize) -> &[usize] {
        &self.sorted_by_arm[arm]
    }

    pub fn gap_profile(&self, theta_star: usize) -> Result<GapProfile> {
        check_index("theta_star", theta_star, self.grid.len())?;
        let column: Vec<f64> = self.means.iter().map(|row| row[theta_star]).collect();
        let optimal_arm = argmax_lowest(&column);
        let best = column[optimal_arm];
        let gaps = column.iter().map(|m| best - m).collect();
        Ok(GapProfile {
            theta_star_index: theta_star,
            optimal_arm,
            gaps,
        })
    }
}

/// Optimal arm and sub-optimality gaps at a fixed true parameter.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GapProfile {
    pub theta_star_index: usize,
    pub optimal_arm: usize,
    pub gaps: Vec<f64>,
}

impl GapProfile {
    /// Smallest positive gap, or `None` when every arm is tied with the best.
    pub fn min_positive_gap(&self) -> Option<f64> {
        self.gaps
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != self.optimal_arm)
            .map(|(_, &g)| g)
            .reduce(f64::min)
    }
}

/// Index of the maximum, ties to the lowest index. Panics on an empty slice.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub(crate) fn check_index(what: &'static str, index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::OutOfRange { what, index, len })
    }
}
