//! End to end: MovieLens-format fixture -> learned model -> empirical simulation.

use std::path::{Path, PathBuf};

use structured_bandit::ingest::{export_model, learn_reward_table, observed_genres, parse_movielens};
use structured_bandit::reward_model::exchange::ModelDocument;
use structured_bandit::reward_model::{competitive_analysis, DEFAULT_TOL};
use structured_bandit::simulation::{
    run_experiment, write_outputs, AlgorithmSpec, EnvironmentKind, ExperimentConfig, ModelSource,
};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/movielens-fixture")
}

fn learned_document(seed: u64) -> ModelDocument {
    let dir = fixture();
    let data = parse_movielens(
        &dir.join("users.dat"),
        &dir.join("movies.dat"),
        &dir.join("ratings.dat"),
    )
    .unwrap();
    let genres = observed_genres(&data.records);
    let learned = learn_reward_table(&data.records, &genres, seed).unwrap();
    export_model(&learned, 2.0)
}

fn config(doc: ModelDocument, theta: f64) -> ExperimentConfig {
    ExperimentConfig {
        scenario_id: "fixture".into(),
        model: ModelSource::Inline(doc),
        theta_star: vec![theta],
        algorithms: ["ucb", "ucb-c", "ts-c"]
            .iter()
            .map(|a| AlgorithmSpec::Id(a.to_string()))
            .collect(),
        horizon: 2000,
        runs: 4,
        master_seed: 3,
        record_every: 500,
        environment: EnvironmentKind::Empirical,
        noise_sigma: None,
    }
}

#[test]
fn document_round_trips_through_json() {
    let doc = learned_document(1);
    let back = ModelDocument::from_json(&doc.to_json()).unwrap();
    assert_eq!(doc, back);
    let model = back.to_model().unwrap();
    assert_eq!(model.num_arms(), 5);
    assert_eq!(model.grid().len(), 20);
    assert!(back.to_pool(&model).unwrap().is_some());
}

#[test]
fn competitive_counts_stay_in_range() {
    let model = learned_document(2).to_model().unwrap();
    for j in 0..model.grid().len() {
        let c = competitive_analysis(&model, j, DEFAULT_TOL).unwrap().count;
        assert!((1..=model.num_arms()).contains(&c));
    }
}

#[test]
fn empirical_experiment_runs_and_writes() {
    // Meta-user 0 rates Drama (g = 2) highest: 1 + (0 + 4) mod 5 = 5.
    let exp = config(learned_document(3), 0.0).resolve(Path::new(".")).unwrap();
    assert_eq!(exp.gaps.optimal_arm, 2);
    let result = run_experiment(&exp, Some(2)).unwrap();
    assert_eq!(result.traces.len(), 12);
    for trace in &result.traces {
        let last = trace.last();
        assert_eq!(last.t, 2000);
        assert_eq!(last.pulls.iter().sum::<u64>(), 2000);
    }
    let tmp = tempfile::tempdir().unwrap();
    write_outputs(&result, tmp.path()).unwrap();
    for f in ["trace.csv", "summary.csv", "pulls.csv"] {
        assert!(tmp.path().join(f).is_file());
    }
}

#[test]
fn config_json_round_trip() {
    let c = config(learned_document(4), 5.0);
    let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
    assert_eq!(c, back);
}

#[test]
#[ignore = "needs MovieLens-1M in data/ml-1m (scripts/fetch_movielens.sh)"]
fn real_corpus_sanity() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ml-1m");
    let data = parse_movielens(
        &dir.join("users.dat"),
        &dir.join("movies.dat"),
        &dir.join("ratings.dat"),
    )
    .unwrap();
    let genres = observed_genres(&data.records);
    assert_eq!(genres.len(), 18);
    let learned = learn_reward_table(&data.records, &genres, 0).unwrap();
    assert_eq!(learned.index.len(), 106);
    let model = export_model(&learned, 1.0).to_model().unwrap();
    for j in 0..model.grid().len() {
        let c = competitive_analysis(&model, j, DEFAULT_TOL).unwrap().count;
        assert!((1..model.num_arms()).contains(&c), "meta-user {j}: C = {c}");
    }
}
