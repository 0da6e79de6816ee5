#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use sbo_core::composition::CcAutomaton;
use sbo_core::model::{parse_model, serialize_model};
use sbo_core::{NamedTransition, Nfa};

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn load(name: &str) -> Nfa {
    let path = models_dir().join(format!("{name}.json"));
    let text = std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_model(&text).unwrap()
}

/// Same model with the controllability of the listed events overridden.
pub fn with_controllable(nfa: &Nfa, controllable: &[&str]) -> Nfa {
    let mut doc: serde_json::Value = serde_json::from_str(&serialize_model(nfa)).unwrap();
    for e in doc["events"].as_array_mut().unwrap() {
        let name = e["name"].as_str().unwrap().to_string();
        e["controllable"] = serde_json::Value::Bool(controllable.contains(&name.as_str()));
    }
    parse_model(doc.to_string().as_bytes()).unwrap()
}

pub fn transitions(list: &[&str]) -> BTreeSet<NamedTransition> {
    list.iter().map(|t| t.parse().unwrap()).collect()
}

pub fn state_names(cc: &CcAutomaton) -> BTreeSet<String> {
    cc.ids().map(|s| cc.state_name(s)).collect()
}

pub fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Random partially observed automaton with at most 6 states and 4 events,
/// accessible and free of unobservable cycles (unobservable transitions only
/// go from a lower to a higher state index).
pub fn random_nfa<R: rand::Rng>(rng: &mut R) -> Nfa {
    let n = rng.gen_range(1..=6usize);
    let m = rng.gen_range(1..=4usize);
    let names = ["a", "b", "c", "d"];
    let mut b = Nfa::builder();
    let mut observable = Vec::new();
    for name in &names[..m] {
        let obs = rng.gen_bool(0.7);
        observable.push(obs);
        b = b.event(*name, obs, rng.gen_bool(0.5));
    }
    for x in 0..n {
        b = b.state(x.to_string());
        if rng.gen_bool(0.3) {
            b = b.secret(x.to_string());
        }
    }
    b = b.initial("0");
    if n > 1 && rng.gen_bool(0.3) {
        b = b.initial(rng.gen_range(1..n).to_string());
    }
    for _ in 0..rng.gen_range(1..=2 * n + 2) {
        let e = rng.gen_range(0..m);
        let from = rng.gen_range(0..n);
        let to = rng.gen_range(0..n);
        if !observable[e] && from >= to {
            continue;
        }
        b = b.transition(from.to_string(), names[e], to.to_string());
    }
    sbo_core::accessible_part(&b.build().unwrap())
}

pub fn nfa_from_seed(seed: u64) -> Nfa {
    use rand::SeedableRng;
    random_nfa(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed))
}

/// Fixed reproducible corpus.
pub fn corpus(count: usize) -> Vec<Nfa> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    (0..count).map(|_| random_nfa(&mut rng)).collect()
}
