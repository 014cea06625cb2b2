//! `sbandit` subcommands. [`run`] returns the process exit code: 0 on success,
//! 1 on runtime failure, 2 on usage or validation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use structured_bandit::ingest::{self, export_model, learn_reward_table, observed_genres, parse_movielens};
use structured_bandit::policies::AlgorithmId;
use structured_bandit::reward_model::exchange::ModelDocument;
use structured_bandit::reward_model::{
    competitive_analysis, theorem_bounds, BoundValue, BoundsParams, CompetitiveAnalysis, RewardModel, DEFAULT_TOL,
};
use structured_bandit::scenarios;
use structured_bandit::simulation::{run_experiment, write_outputs, ExperimentConfig, ModelSource};
use structured_bandit::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sbandit", version, about = "Structured bandit experiments and diagnostics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment config and write trace.csv, summary.csv and pulls.csv.
    Run(RunArgs),
    /// Competitive-arm analysis and theorem bounds for a model at theta*.
    Analyze(AnalyzeArgs),
    /// Build a model with replay pools from MovieLens-1M files.
    Ingest(IngestArgs),
    /// List bundled scenarios and algorithm ids.
    Describe(DescribeArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub horizon: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Model-exchange JSON file.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    pub model: Option<PathBuf>,
    /// Take the model and theta* from an experiment config instead.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated coordinates, e.g. `0.9,0.2`.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "config")]
    pub theta_star: Option<String>,
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 20_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub users: PathBuf,
    #[arg(long)]
    pub movies: PathBuf,
    #[arg(long)]
    pub ratings: PathBuf,
    /// Output model-exchange JSON with pools.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Comma-separated genre list; defaults to every observed genre.
    #[arg(long)]
    pub genres: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// Write every bundled scenario config and model file into this directory.
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { EXIT_USAGE } else { EXIT_RUNTIME };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Parse `args` (including the program name) and execute.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Ingest(a) => cmd_ingest(&a, out),
        Command::Describe(a) => cmd_describe(&a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: impl std::fmt::Display) -> CmdResult {
    writeln!(out, "{text}").map_err(|e| Failure::runtime(format!("writing output: {e}")))
}

fn require_file(path: &Path, what: &str) -> CmdResult {
    if path.is_file() {
        Ok(())
    } else {
        Err(Failure::usage(format!("{what} file not found: {}", path.display())))
    }
}

fn fmt_theta(theta: &[f64]) -> String {
    let parts: Vec<String> = theta.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(", "))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> CmdResult {
    require_file(&args.config, "config")?;
    let (mut config, base) = ExperimentConfig::read(&args.config).map_err(|e| match e {
        Error::Io { .. } => Failure::usage(e.to_string()),
        e => Failure::usage(format!("{}: {e}", args.config.display())),
    })?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(h) = args.horizon {
        config.horizon = h;
        config.record_every = config.record_every.min(h.max(1));
    }
    if args.threads == Some(0) {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    let experiment = config.resolve(&base)?;
    let analysis = competitive_analysis(&experiment.model, experiment.theta_star, DEFAULT_TOL)?;
    let theta = experiment.model.grid().point(experiment.theta_star).to_vec();
    let algorithms: Vec<String> = experiment.algorithms.iter().map(|(id, _)| id.to_string()).collect();

    let result = run_experiment(&experiment, args.threads).map_err(|e| Failure::runtime(e.to_string()))?;
    write_outputs(&result, &args.out).map_err(|e| Failure::runtime(e.to_string()))?;

    if args.json {
        let finals: Vec<Value> = experiment
            .algorithms
            .iter()
            .map(|(id, _)| {
                let row = result.summary_at(*id, experiment.horizon).expect("final checkpoint");
                json!({"algorithm": id.to_string(), "mean_regret": row.mean_regret, "std_regret": row.std_regret})
            })
            .collect();
        let v = json!({
            "scenario_id": experiment.scenario_id,
            "arms": experiment.model.num_arms(),
            "grid_points": experiment.model.grid().len(),
            "theta_star": theta,
            "competitive_count": analysis.count,
            "algorithms": algorithms,
            "horizon": experiment.horizon,
            "runs": experiment.runs,
            "final_regret": finals,
            "out": args.out.display().to_string(),
        });
        return emit(out, serde_json::to_string_pretty(&v).expect("json"));
    }
    emit(
        out,
        format!(
            "scenario {}: K = {}, |Theta| = {}, theta* = {}, C(theta*) = {}\nalgorithms: {}\nhorizon {}, runs {}",
            experiment.scenario_id,
            experiment.model.num_arms(),
            experiment.model.grid().len(),
            fmt_theta(&theta),
            analysis.count,
            algorithms.join(", "),
            experiment.horizon,
            experiment.runs,
        ),
    )?;
    for (id, _) in &experiment.algorithms {
        let row = result.summary_at(*id, experiment.horizon).expect("final checkpoint");
        emit(
            out,
            format!(
                "  {:<14} mean regret {:>10.2}  (std {:.2})",
                id.to_string(),
                row.mean_regret,
                row.std_regret
            ),
        )?;
    }
    emit(out, format!("wrote {}", args.out.display()))
}

fn parse_theta(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::usage(format!("bad theta* coordinate `{}`", p.trim())))
        })
        .collect()
}

fn degree_json(d: Option<f64>) -> Value {
    match d {
        None => Value::Null,
        Some(v) if v.is_infinite() => json!("inf"),
        Some(v) => json!(v),
    }
}

fn bound_json(b: &Option<BoundValue>) -> Value {
    match b {
        None => Value::Null,
        Some(v) => serde_json::to_value(v).expect("json"),
    }
}

fn analysis_json(
    model: &RewardModel,
    theta: &[f64],
    a: &CompetitiveAnalysis,
    bounds: &structured_bandit::reward_model::Bounds,
) -> Value {
    let arms: Vec<Value> = (0..model.num_arms())
        .map(|k| {
            let b = &bounds.arms[k];
            json!({
                "arm": k + 1,
                "label": model.arm_labels()[k],
                "gap": a.gap_profile.gaps[k],
                "competitive": a.competitive[k],
                "degree": degree_json(a.degrees[k]),
                "t0": bound_json(&b.t0),
                "t_b": bound_json(&b.t_b),
                "pulls_bound_ucb_c": bound_json(&b.pulls_ucb_c()),
                "pulls_bound_ts_c": bound_json(&b.pulls_ts_c()),
            })
        })
        .collect();
    json!({
        "theta_star": theta,
        "theta_star_index": a.gap_profile.theta_star_index,
        "optimal_arm": a.gap_profile.optimal_arm + 1,
        "theta_star_set_size": a.theta_star_set.len(),
        "competitive_count": a.count,
        "bounded_regret_possible": a.bounded_regret_possible(),
        "arms": arms,
        "alpha": bounds.params_alpha,
        "beta": bounds.params_beta,
        "horizon": bounds.horizon,
        "regret_bound_ucb_c": serde_json::to_value(&bounds.regret_ucb_c).expect("json"),
        "regret_bound_ts_c": serde_json::to_value(&bounds.regret_ts_c).expect("json"),
    })
}

pub fn cmd_analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> CmdResult {
    let (model, theta) = match (&args.model, &args.config) {
        (Some(path), _) => {
            require_file(path, "model")?;
            let doc = ModelDocument::read(path).map_err(|e| Failure::usage(e.to_string()))?;
            let model = doc.to_model()?;
            let text = args
                .theta_star
                .as_deref()
                .ok_or_else(|| Failure::usage("--theta-star is required"))?;
            (model, parse_theta(text)?)
        }
        (None, Some(path)) => {
            require_file(path, "config")?;
            let (config, base) = ExperimentConfig::read(path).map_err(|e| Failure::usage(e.to_string()))?;
            let theta = match &args.theta_star {
                Some(t) => parse_theta(t)?,
                None => config.theta_star.clone(),
            };
            let mut config = config;
            config.theta_star = theta.clone();
            (config.resolve(&base)?.model, theta)
        }
        (None, None) => return Err(Failure::usage("either --model or --config is required")),
    };
    if !(args.alpha > 0.0 && args.beta > 0.0 && args.tol >= 0.0) {
        return Err(Failure::usage("alpha and beta must be positive and tol non-negative"));
    }
    let j = model.grid().locate(&theta)?;
    let a = competitive_analysis(&model, j, args.tol)?;
    let bounds = theorem_bounds(
        &a,
        &model,
        BoundsParams {
            alpha: args.alpha,
            beta: args.beta,
            horizon: args.horizon,
        },
    );
    if args.json {
        return emit(
            out,
            serde_json::to_string_pretty(&analysis_json(&model, &theta, &a, &bounds)).expect("json"),
        );
    }
    let gp = &a.gap_profile;
    emit(
        out,
        format!(
            "theta* = {} (grid index {}), K = {}, |Theta| = {}\noptimal arm k* = {}\n|Theta*| = {}, C(theta*) = {}{}",
            fmt_theta(&theta),
            j,
            model.num_arms(),
            model.grid().len(),
            gp.optimal_arm + 1,
            a.theta_star_set.len(),
            a.count,
            if a.bounded_regret_possible() {
                " (bounded regret possible)"
            } else {
                ""
            },
        ),
    )?;
    emit(
        out,
        "arm  gap        competitive  eps_k      t0           t_b          pulls UCB-C       pulls TS-C",
    )?;
    for k in 0..model.num_arms() {
        let b = &bounds.arms[k];
        let show = |v: &Option<BoundValue>| v.as_ref().map_or("-".to_string(), |v| v.to_string());
        let eps = match a.degrees[k] {
            None => "-".to_string(),
            Some(v) if v.is_infinite() => "inf".to_string(),
            Some(v) => format!("{v:.4}"),
        };
        emit(
            out,
            format!(
                "{:<4} {:<10} {:<12} {:<10} {:<12} {:<12} {:<17} {}",
                k + 1,
                format!("{:.4}", gp.gaps[k]),
                a.competitive[k],
                eps,
                show(&b.t0),
                show(&b.t_b),
                show(&b.pulls_ucb_c()),
                show(&b.pulls_ts_c()),
            ),
        )?;
    }
    emit(
        out,
        format!(
            "regret bound at T = {} (alpha = {}, beta = {}): UCB-C {}, TS-C {}",
            args.horizon, args.alpha, args.beta, bounds.regret_ucb_c, bounds.regret_ts_c
        ),
    )
}

pub fn cmd_ingest(args: &IngestArgs, out: &mut dyn Write) -> CmdResult {
    require_file(&args.users, "users")?;
    require_file(&args.movies, "movies")?;
    require_file(&args.ratings, "ratings")?;
    if !(args.sigma > 0.0 && args.sigma.is_finite()) {
        return Err(Failure::usage("--sigma must be positive"));
    }
    let data =
        parse_movielens(&args.users, &args.movies, &args.ratings).map_err(|e| Failure::runtime(e.to_string()))?;
    let genres: Vec<String> = match &args.genres {
        Some(list) => list
            .split(',')
            .map(|g| g.trim().to_string())
            .filter(|g| !g.is_empty())
            .collect(),
        None => observed_genres(&data.records),
    };
    let learned = learn_reward_table(&data.records, &genres, args.seed).map_err(|e| Failure::runtime(e.to_string()))?;
    let doc = export_model(&learned, args.sigma);
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Failure::runtime(format!("{}: {e}", parent.display())))?;
    }
    doc.write(&args.out).map_err(|e| Failure::runtime(e.to_string()))?;
    let report = |r: &ingest::ParseReport| json!({"lines": r.total, "malformed": r.malformed});
    if args.json {
        let v = json!({
            "meta_users": learned.index.len(),
            "genres": genres,
            "fallback_cells": learned.table.fallback_cells(),
            "records": data.records.len(),
            "train": learned.split.train.len(),
            "test": learned.split.test.len(),
            "users": report(&data.users),
            "movies": report(&data.movies),
            "ratings": report(&data.ratings),
            "out": args.out.display().to_string(),
        });
        return emit(out, serde_json::to_string_pretty(&v).expect("json"));
    }
    emit(
        out,
        format!(
            "{} ratings ({} malformed lines skipped)\nmeta-users: {}\ngenres: {} ({})\nfallback cells: {}\ntrain/test: {}/{}\nwrote {}",
            data.records.len(),
            data.users.malformed + data.movies.malformed + data.ratings.malformed,
            learned.index.len(),
            genres.len(),
            genres.join(", "),
            learned.table.fallback_cells(),
            learned.split.train.len(),
            learned.split.test.len(),
            args.out.display(),
        ),
    )
}

fn export_scenarios(dir: &Path) -> Result<usize, Failure> {
    let models_dir = dir.join("models");
    std::fs::create_dir_all(&models_dir).map_err(|e| Failure::runtime(format!("{}: {e}", models_dir.display())))?;
    let all = scenarios::all();
    for s in &all {
        let mut config = s.config.clone();
        if let (Some(name), ModelSource::Inline(doc)) = (s.model_name, &config.model) {
            let rel = PathBuf::from("models").join(format!("{name}.json"));
            doc.write(&dir.join(&rel))
                .map_err(|e| Failure::runtime(e.to_string()))?;
            config.model = ModelSource::File(rel);
        }
        let path = dir.join(format!("{}.json", s.id));
        std::fs::write(&path, config.to_json() + "\n")
            .map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))?;
    }
    Ok(all.len())
}

pub fn cmd_describe(args: &DescribeArgs, out: &mut dyn Write) -> CmdResult {
    let all = scenarios::all();
    if let Some(dir) = &args.export {
        let n = export_scenarios(dir)?;
        if !args.json {
            emit(out, format!("exported {n} scenarios to {}", dir.display()))?;
        }
    }
    if args.json {
        let list: Vec<Value> = all
            .iter()
            .map(|s| json!({"id": s.id, "description": s.description, "theta_star": s.config.theta_star}))
            .collect();
        let v = json!({"scenarios": list, "algorithms": AlgorithmId::ALL});
        return emit(out, serde_json::to_string_pretty(&v).expect("json"));
    }
    emit(out, "bundled scenarios:")?;
    for s in &all {
        emit(out, format!("  {:<30} {}", s.id, s.description))?;
    }
    emit(out, "algorithms:")?;
    emit(out, format!("  {}", AlgorithmId::ALL.join(", ")))
}
