//! Evaluated finite-time pull-count bounds for UCB-C and TS-C.
//!
//! Non-competitive arms get the `O(1)` bound driven by the burn-in
//! constants `t0` (UCB-C) and `t_b` (TS-C); every sub-optimal arm gets the
//! `O(log T)` bound. The regret total weights each arm's bound by its gap.

use serde::Serialize;

use super::{CompetitiveAnalysis, RewardModel};

/// Upper limit of the integer scans for `t0` and `t_b`.
pub const T_SCAN_CAP: u64 = 1_000_000_000;

/// A bound that may not exist for the given parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum BoundValue {
    Finite(f64),
    /// Parameters fall outside the range where the expression is a valid bound.
    Invalid(String),
    /// The burn-in scan did not terminate below [`T_SCAN_CAP`].
    ExceedsCap,
}

impl BoundValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            BoundValue::Finite(v) => Some(*v),
            _ => None,
        }
    }

    fn map(self, f: impl FnOnce(f64) -> f64) -> BoundValue {
        match self {
            BoundValue::Finite(v) => BoundValue::Finite(f(v)),
            other => other,
        }
    }
}

impl std::fmt::Display for BoundValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundValue::Finite(v) => write!(f, "{v:.3}"),
            BoundValue::Invalid(why) => write!(f, "not valid ({why})"),
            BoundValue::ExceedsCap => write!(f, "burn-in exceeds scan cap"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsParams {
    pub alpha: f64,
    pub beta: f64,
    pub horizon: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmBound {
    pub arm: usize,
    pub competitive: bool,
    pub gap: f64,
    /// Burn-in constants, present for non-competitive arms.
    pub t0: Option<BoundValue>,
    pub t_b: Option<BoundValue>,
    /// `O(1)` bounds, present for non-competitive arms.
    pub noncompetitive_ucb_c: Option<BoundValue>,
    pub noncompetitive_ts_c: Option<BoundValue>,
    /// `O(log T)` bounds, present for arms with a positive gap.
    pub competitive_ucb_c: Option<BoundValue>,
    pub competitive_ts_c: Option<BoundValue>,
}

impl ArmBound {
    /// Tightest valid pull bound for UCB-C.
    pub fn pulls_ucb_c(&self) -> Option<BoundValue> {
        tightest(&self.noncompetitive_ucb_c, &self.competitive_ucb_c)
    }

    pub fn pulls_ts_c(&self) -> Option<BoundValue> {
        tightest(&self.noncompetitive_ts_c, &self.competitive_ts_c)
    }
}

fn tightest(a: &Option<BoundValue>, b: &Option<BoundValue>) -> Option<BoundValue> {
    match (a, b) {
        (Some(BoundValue::Finite(x)), Some(BoundValue::Finite(y))) => Some(BoundValue::Finite(x.min(*y))),
        (Some(BoundValue::Finite(x)), _) => Some(BoundValue::Finite(*x)),
        (_, Some(v @ BoundValue::Finite(_))) => Some(v.clone()),
        (_, Some(v)) => Some(v.clone()),
        (Some(v), None) => Some(v.clone()),
        (None, None) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds {
    pub params_alpha: f64,
    pub params_beta: f64,
    pub horizon: u64,
    pub arms: Vec<ArmBound>,
    pub regret_ucb_c: BoundValue,
    pub regret_ts_c: BoundValue,
}

/// Evaluate the pull-count and regret bounds for an analysed instance.
pub fn theorem_bounds(analysis: &CompetitiveAnalysis, model: &RewardModel, params: BoundsParams) -> Bounds {
    let k = model.num_arms();
    let sigma2 = model.sigma() * model.sigma();
    let BoundsParams { alpha, beta, horizon } = params;
    let gp = &analysis.gap_profile;
    let delta_min = gp.min_positive_gap().filter(|&d| d > 0.0);

    let arms: Vec<ArmBound> = (0..k)
        .map(|arm| {
            let gap = gp.gaps[arm];
            let competitive = analysis.competitive[arm];
            let mut out = ArmBound {
                arm,
                competitive,
                gap,
                t0: None,
                t_b: None,
                noncompetitive_ucb_c: None,
                noncompetitive_ts_c: None,
                competitive_ucb_c: None,
                competitive_ts_c: None,
            };
            if gap > 0.0 {
                out.competitive_ucb_c = Some(competitive_ucb_c(alpha, sigma2, gap, k, horizon));
                out.competitive_ts_c = Some(competitive_ts_c(alpha, beta, sigma2, gap, k, horizon));
            }
            if let Some(eps) = analysis.degrees[arm] {
                let (t0, t_b, ucb, ts) = match delta_min {
                    None => {
                        let why = BoundValue::Invalid("minimum gap is zero".into());
                        (why.clone(), why.clone(), why.clone(), why)
                    }
                    Some(dmin) => {
                        let threshold = dmin.min(eps);
                        let t0 = burn_in(threshold, 4.0, 1.0, k, alpha, sigma2, 2.0);
                        let t_b = burn_in(threshold, 3.0, 3.0, k, alpha, sigma2, (11.0 * beta * sigma2).exp());
                        let ucb = noncompetitive_ucb_c(&t0, alpha, k, horizon);
                        let ts = noncompetitive_ts_c(&t_b, alpha, beta, k, horizon);
                        (t0, t_b, ucb, ts)
                    }
                };
                out.t0 = Some(t0);
                out.t_b = Some(t_b);
                out.noncompetitive_ucb_c = Some(ucb);
                out.noncompetitive_ts_c = Some(ts);
            }
            out
        })
        .collect();

    let total = |pick: fn(&ArmBound) -> Option<BoundValue>| -> BoundValue {
        let mut sum = 0.0;
        for a in arms.iter().filter(|a| a.gap > 0.0) {
            match pick(a) {
                Some(BoundValue::Finite(v)) => sum += v * a.gap,
                Some(other) => return other,
                None => return BoundValue::Invalid("missing arm bound".into()),
            }
        }
        BoundValue::Finite(sum)
    };
    let regret_ucb_c = total(ArmBound::pulls_ucb_c);
    let regret_ts_c = total(ArmBound::pulls_ts_c);

    Bounds {
        params_alpha: alpha,
        params_beta: beta,
        horizon,
        arms,
        regret_ucb_c,
        regret_ts_c,
    }
}

/// Smallest integer `tau >= lower` with
/// `threshold >= outer * sqrt(inner * K alpha sigma^2 ln(tau) / tau)`.
///
/// `ln(tau)/tau` is strictly decreasing for `tau >= 3`, so after checking
/// `tau = 2` the first satisfying integer is found by bisection; the result
/// equals that of a linear scan.
pub(crate) fn burn_in(
    threshold: f64,
    outer: f64,
    inner: f64,
    k: usize,
    alpha: f64,
    sigma2: f64,
    lower: f64,
) -> BoundValue {
    if !(threshold > 0.0) {
        return BoundValue::Invalid("threshold must be positive".into());
    }
    let scale = inner * k as f64 * alpha * sigma2;
    let holds = |tau: u64| {
        let t = tau as f64;
        threshold >= outer * (scale * t.ln() / t).sqrt()
    };
    if !lower.is_finite() || lower > T_SCAN_CAP as f64 {
        return BoundValue::ExceedsCap;
    }
    let mut lo = (lower.ceil() as u64).max(1);
    if lo <= 2 {
        for tau in lo..=2 {
            if holds(tau) {
                return BoundValue::Finite(tau as f64);
            }
        }
        lo = 3;
    }
    if !holds(T_SCAN_CAP) {
        return BoundValue::ExceedsCap;
    }
    let mut hi = T_SCAN_CAP;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    BoundValue::Finite(lo as f64)
}

/// `sum_{t=from}^{to} f(t)`, empty when `from > to`.
fn sum_range(from: u64, to: u64, f: impl Fn(f64) -> f64) -> f64 {
    (from.max(1)..=to).map(|t| f(t as f64)).sum()
}

fn tail_sum(alpha: f64, k: usize, horizon: u64) -> f64 {
    sum_range(1, horizon, |t| 2.0 * k as f64 * t.powf(1.0 - alpha))
}

fn competitive_ucb_c(alpha: f64, sigma2: f64, gap: f64, k: usize, horizon: u64) -> BoundValue {
    if !(alpha > 2.0) {
        return BoundValue::Invalid("requires alpha > 2".into());
    }
    let t = horizon as f64;
    BoundValue::Finite(
        8.0 * alpha * sigma2 * t.ln() / (gap * gap) + 2.0 * alpha / (alpha - 2.0) + tail_sum(alpha, k, horizon),
    )
}

fn competitive_ts_c(alpha: f64, beta: f64, sigma2: f64, gap: f64, k: usize, horizon: u64) -> BoundValue {
    if !(alpha > 2.0) || !(beta > 1.0) {
        return BoundValue::Invalid("requires alpha > 2 and beta > 1".into());
    }
    let t = horizon as f64;
    let g2 = gap * gap;
    BoundValue::Finite(
        9.0 * beta * sigma2 * t.ln() / (2.0 * g2)
            + 3.0
            + (11.0 * beta * sigma2).exp()
            + 2.0 * sum_range(1, horizon, |s| (1.0 / (s * g2)).powf(2.0 * beta))
            + tail_sum(alpha, k, horizon),
    )
}

fn noncompetitive_ucb_c(t0: &BoundValue, alpha: f64, k: usize, horizon: u64) -> BoundValue {
    if !(alpha > 3.0) {
        return BoundValue::Invalid("requires alpha > 3".into());
    }
    let kf = k as f64;
    t0.clone().map(|t0| {
        let start = (kf * t0) as u64;
        kf * t0
            + tail_sum(alpha, k, horizon)
            + kf.powi(3) * sum_range(start, horizon, |t| 6.0 * (t / kf).powf(2.0 - alpha))
    })
}

fn noncompetitive_ts_c(t_b: &BoundValue, alpha: f64, beta: f64, k: usize, horizon: u64) -> BoundValue {
    if !(alpha > 3.0) || !(beta > 1.0) {
        return BoundValue::Invalid("requires alpha > 3 and beta > 1".into());
    }
    let kf = k as f64;
    t_b.clone().map(|tb| {
        let start = (kf * tb) as u64;
        kf * tb
            + tail_sum(alpha, k, horizon)
            + kf.powi(3) * sum_range(start, horizon, |t| 4.0 * (t / kf).powf(2.0 - alpha))
            + kf * kf * sum_range(start, horizon, |t| (t / kf).powf(1.0 - 2.0 * beta))
    })
}
