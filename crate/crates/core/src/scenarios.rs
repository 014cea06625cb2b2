//! Bundled scenarios. The one-dimensional reward curves are look-alike
//! reconstructions of drawn figures, hence the `analogue` ids.

use crate::reward_model::exchange::ModelDocument;
use crate::reward_model::{Axis, RewardModel, ThetaGrid};
use crate::simulation::{
    AlgorithmEntry, AlgorithmSpec, EnvironmentKind, ExperimentConfig, GridSpec, LinearSpec, ModelSource,
};

pub const SIGMA: f64 = 2.0;
pub const MASTER_SEED: u64 = 20_190_601;

/// Standard Algorithm-C comparison set.
pub const COMPARISON: [&str; 7] = ["ucb", "ts", "klucb", "ucb-c", "ts-c", "klucb-c", "ucb-s"];
pub const INFORMATIVE: [&str; 6] = [
    "ucb",
    "ucb-c",
    "ucb-c-kldiv",
    "ucb-c-entropy",
    "ucb-c-random",
    "ts-c-kldiv",
];

#[derive(Debug, Clone)]
pub struct Scenario {
    pub id: String,
    pub description: String,
    /// File stem of the shared model in exports; `None` for linear models.
    pub model_name: Option<&'static str>,
    pub config: ExperimentConfig,
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

fn tabulate(grid: ThetaGrid, arms: &[&dyn Fn(f64) -> f64], labels: &[&str]) -> RewardModel {
    let means = arms
        .iter()
        .map(|f| grid.points().iter().map(|p| round12(f(p[0]))).collect())
        .collect();
    RewardModel::from_table_labeled(grid, means, SIGMA, labels.iter().map(|s| s.to_string()).collect())
        .expect("bundled model is valid")
}

fn line_grid(start: f64, stop: f64, step: f64) -> ThetaGrid {
    ThetaGrid::from_axes(&[Axis::new(start, stop, step)]).expect("bundled grid is valid")
}

/// Three arms on `[0, 6]`: arm 2 best on `[0, 1]`, arm 3 on `[1, 2.5]`,
/// arm 1 beyond. `C(theta*)` is 1, 2 and 3 at 0.5, 1.5 and 2.6.
pub fn fig5_model() -> RewardModel {
    let arm1 = |t: f64| {
        if t < 0.5 {
            1.5 + t
        } else if t <= 3.0 {
            2.0
        } else {
            2.0 + 0.5 * (t - 3.0)
        }
    };
    let arm2 = |t: f64| 4.5 - 2.0 * t;
    let arm3 = |t: f64| {
        if t < 0.8 {
            2.5 - (0.8 - t)
        } else if t <= 2.5 {
            2.5
        } else {
            2.5 - 10.0 * (t - 2.5)
        }
    };
    tabulate(
        line_grid(0.0, 6.0, 0.05),
        &[&arm1, &arm2, &arm3],
        &["arm 1", "arm 2", "arm 3"],
    )
}

/// Two arms on `[0, 6]`: arm 2 falls linearly, arm 1 has a plateau on
/// `[2.5, 5]`. Used for the `C(theta*)` sweep over `[0, 5]`.
pub fn fig7_model() -> RewardModel {
    let arm1 = |t: f64| {
        if t < 2.5 {
            2.0 - 0.5 * (2.5 - t)
        } else if t <= 5.0 {
            2.0
        } else {
            2.0 + (t - 5.0)
        }
    };
    let arm2 = |t: f64| 4.0 - 2.0 / 3.0 * t;
    tabulate(line_grid(0.0, 6.0, 0.05), &[&arm1, &arm2], &["arm 1", "arm 2"])
}

pub const FIG8_FEATURES: [[f64; 2]; 3] = [[2.0, 1.0], [1.0, 1.5], [3.0, -1.0]];

pub fn fig8_spec() -> LinearSpec {
    LinearSpec {
        features: FIG8_FEATURES.iter().map(|x| x.to_vec()).collect(),
        grid: GridSpec::Axes(vec![Axis::new(-1.0, 1.0, 0.05), Axis::new(-1.0, 1.0, 0.05)]),
        sigma: SIGMA,
        arm_labels: None,
    }
}

/// `mu_1 = t1 + t2`, `mu_2 = t1 - t2`, `mu_3 = max(|t1|, |t2|)` on `[-1, 1]^2`.
pub fn fig9_model() -> RewardModel {
    let grid =
        ThetaGrid::from_axes(&[Axis::new(-1.0, 1.0, 0.05), Axis::new(-1.0, 1.0, 0.05)]).expect("bundled grid is valid");
    let mut means = vec![Vec::new(), Vec::new(), Vec::new()];
    for p in grid.points() {
        means[0].push(round12(p[0] + p[1]));
        means[1].push(round12(p[0] - p[1]));
        means[2].push(round12(p[0].abs().max(p[1].abs())));
    }
    RewardModel::from_table(grid, means, SIGMA).expect("bundled model is valid")
}

/// Step scenario on `[0, 6]`, step 0.1: arms 1 and 2 are flat on `[2, 4]`,
/// arm 3 jumps from 1 to 4 at 3. At theta* = 3.1 arm 2 is optimal and a few
/// pulls of arm 3 rule out the region where arm 1 is best.
pub fn fig13_model() -> RewardModel {
    let arm1 = |t: f64| {
        if t < 2.0 {
            3.5 + 1.5 * (2.0 - t)
        } else if t <= 4.0 {
            3.5
        } else {
            3.5 - 0.25 * (t - 4.0)
        }
    };
    let arm2 = |t: f64| {
        if t < 2.0 {
            4.5 - 0.1 * (2.0 - t)
        } else if t <= 4.0 {
            4.5
        } else {
            4.5 - 0.5 * (t - 4.0)
        }
    };
    let arm3 = |t: f64| if t < 3.0 { 1.0 } else { 4.0 };
    tabulate(
        line_grid(0.0, 6.0, 0.1),
        &[&arm1, &arm2, &arm3],
        &["arm 1", "arm 2", "step arm"],
    )
}

/// Three points, three arms, each arm best (by 0.05) at its own point. The
/// gaps are tiny next to the noise, so the confidence set keeps every point
/// and Algorithm-C never drops an arm.
pub fn classic_reduction_model() -> RewardModel {
    let grid = ThetaGrid::scalar(&[0.0, 1.0, 2.0]).expect("valid grid");
    let means = (0..3)
        .map(|k| (0..3).map(|j| if k == j { 1.05 } else { 1.0 }).collect())
        .collect();
    RewardModel::from_table(grid, means, SIGMA).expect("valid model")
}

fn specs(ids: &[&str]) -> Vec<AlgorithmSpec> {
    ids.iter().map(|id| AlgorithmSpec::Id(id.to_string())).collect()
}

fn config(
    id: String,
    model: ModelSource,
    theta_star: Vec<f64>,
    algorithms: &[&str],
    horizon: u64,
    runs: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        scenario_id: id,
        model,
        theta_star,
        algorithms: specs(algorithms),
        horizon,
        runs,
        master_seed: MASTER_SEED,
        record_every: 100,
        environment: EnvironmentKind::Gaussian,
        noise_sigma: None,
    }
}

fn inline(model: &RewardModel) -> ModelSource {
    ModelSource::Inline(ModelDocument::from_model(model))
}

fn label(theta: &[f64]) -> String {
    theta.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join("_")
}

pub fn fig5(theta: f64) -> Scenario {
    let id = format!("fig5-analogue-theta{}", label(&[theta]));
    Scenario {
        description: format!("3-arm piecewise-linear analogue, theta* = {theta}"),
        model_name: Some("fig5-analogue"),
        config: config(id.clone(), inline(&fig5_model()), vec![theta], &COMPARISON, 50_000, 100),
        id,
    }
}

pub fn fig7(theta: f64) -> Scenario {
    let id = format!("fig7-analogue-theta{}", label(&[theta]));
    Scenario {
        description: format!("2-arm analogue for the C(theta*) sweep, theta* = {theta}"),
        model_name: Some("fig7-analogue"),
        config: config(id.clone(), inline(&fig7_model()), vec![theta], &COMPARISON, 20_000, 100),
        id,
    }
}

pub fn fig8(theta: [f64; 2]) -> Scenario {
    let id = format!("fig8-linear-theta{}", label(&theta));
    Scenario {
        description: format!("linear bandit, x = (2,1), (1,1.5), (3,-1), theta* = {theta:?}"),
        model_name: None,
        config: config(
            id.clone(),
            ModelSource::Linear(fig8_spec()),
            theta.to_vec(),
            &COMPARISON,
            20_000,
            100,
        ),
        id,
    }
}

pub fn fig9(theta: [f64; 2]) -> Scenario {
    let id = format!("fig9-multi-theta{}", label(&theta));
    Scenario {
        description: format!("2-D hidden parameter, mu = (t1+t2, t1-t2, max|t|), theta* = {theta:?}"),
        model_name: Some("fig9-multi"),
        config: config(
            id.clone(),
            inline(&fig9_model()),
            theta.to_vec(),
            &["ucb", "ts", "ucb-c", "ts-c", "ucb-s"],
            20_000,
            50,
        ),
        id,
    }
}

pub fn fig13() -> Scenario {
    let id = "fig13-analogue-step".to_string();
    let mut c = config(id.clone(), inline(&fig13_model()), vec![3.1], &INFORMATIVE, 20_000, 50);
    c.algorithms = INFORMATIVE
        .iter()
        .map(|id| {
            AlgorithmSpec::Full(AlgorithmEntry {
                id: id.to_string(),
                alpha: 3.0,
                beta: 1.0,
                gamma: 30.0,
                d: 1.1,
            })
        })
        .collect();
    Scenario {
        description: "step-arm informative scenario, theta* = 3.1, gamma = 30, d = 1.1".into(),
        model_name: Some("fig13-analogue"),
        config: c,
        id,
    }
}

pub fn classic_reduction() -> Scenario {
    let id = "classic-reduction".to_string();
    Scenario {
        description: "all arms competitive every round; Algorithm-C equals its base".into(),
        model_name: Some("classic-reduction"),
        config: config(
            id.clone(),
            inline(&classic_reduction_model()),
            vec![0.0],
            &["ucb", "ucb-c", "ts", "ts-c"],
            3_000,
            20,
        ),
        id,
    }
}

pub fn all() -> Vec<Scenario> {
    let mut out: Vec<Scenario> = [0.5, 1.5, 2.6].into_iter().map(fig5).collect();
    out.extend((0..=10).map(|i| fig7(i as f64 * 0.5)));
    out.push(fig8([0.9, 0.9]));
    out.push(fig8([0.5, 0.5]));
    out.push(fig9([0.9, 0.2]));
    out.push(fig9([-0.2, 0.1]));
    out.push(fig13());
    out.push(classic_reduction());
    out
}

pub fn find(id: &str) -> Option<Scenario> {
    all().into_iter().find(|s| s.id == id)
}
