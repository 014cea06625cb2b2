//! The published JSON schemas must name exactly the keys serde reads and writes.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::Value;
use structured_bandit::policies::AlgorithmId;
use structured_bandit::scenarios;

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &Value) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn config_keys_match() {
    let s = schema("experiment-config.schema.json");
    let mut config = scenarios::fig5(0.5).config;
    config.noise_sigma = Some(1.0);
    let v = serde_json::to_value(&config).unwrap();
    assert_eq!(keys(&v), keys(&s["properties"]));

    let required: BTreeSet<String> = s["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_str().unwrap().to_string())
        .collect();
    let mut minimal = v.clone();
    for optional in ["record_every", "environment", "noise_sigma"] {
        minimal.as_object_mut().unwrap().remove(optional);
    }
    assert_eq!(keys(&minimal), required);
    assert!(serde_json::from_value::<structured_bandit::simulation::ExperimentConfig>(minimal).is_ok());
}

#[test]
fn algorithm_ids_match() {
    let s = schema("experiment-config.schema.json");
    let listed: Vec<&str> = s["$defs"]["algorithm_id"]["enum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(listed, AlgorithmId::ALL);
}

#[test]
fn model_document_keys_match() {
    let s = schema("model-exchange.schema.json");
    let doc = structured_bandit::reward_model::exchange::ModelDocument {
        labels: Some(vec!["a".into()]),
        pools: Some(Default::default()),
        ..structured_bandit::reward_model::exchange::ModelDocument::from_model(&scenarios::classic_reduction_model())
    };
    assert_eq!(keys(&serde_json::to_value(&doc).unwrap()), keys(&s["properties"]));
}
