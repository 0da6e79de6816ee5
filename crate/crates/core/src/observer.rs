//! Subset construction over observable events.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::automaton::{Event, EventId, Nfa, StateSet};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EstimateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimateClass {
    Secret,
    NonSecret,
    Hybrid,
}

/// Deterministic automaton over state estimates of a source [`Nfa`].
///
/// Estimates are numbered in discovery order. Event ids refer to the source
/// automaton's alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observer {
    state_names: Vec<String>,
    alphabet: Vec<Event>,
    estimates: Vec<StateSet>,
    index: HashMap<StateSet, EstimateId>,
    delta: Vec<BTreeMap<EventId, EstimateId>>,
    initials: Vec<EstimateId>,
}

impl Observer {
    fn explore(nfa: &Nfa, seeds: Vec<StateSet>) -> Observer {
        let mut obs = Observer {
            state_names: nfa.states().map(|x| nfa.state_name(x).to_string()).collect(),
            alphabet: nfa.events().to_vec(),
            estimates: Vec::new(),
            index: HashMap::new(),
            delta: Vec::new(),
            initials: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for seed in seeds {
            let (id, fresh) = obs.intern(seed);
            if !obs.initials.contains(&id) {
                obs.initials.push(id);
            }
            if fresh {
                queue.push_back(id);
            }
        }
        let observable: Vec<EventId> = nfa.observable_events().collect();
        while let Some(q) = queue.pop_front() {
            for &sigma in &observable {
                let post: StateSet = obs.estimates[q.0]
                    .iter()
                    .flat_map(|&x| nfa.successors(x, sigma))
                    .collect();
                if post.is_empty() {
                    continue;
                }
                let next = nfa
                    .unobservable_reach(&post)
                    .expect("successor states belong to the automaton");
                let (id, fresh) = obs.intern(next);
                if fresh {
                    queue.push_back(id);
                }
                obs.delta[q.0].insert(sigma, id);
            }
        }
        obs
    }

    fn intern(&mut self, q: StateSet) -> (EstimateId, bool) {
        if let Some(&id) = self.index.get(&q) {
            return (id, false);
        }
        let id = EstimateId(self.estimates.len());
        self.index.insert(q.clone(), id);
        self.estimates.push(q);
        self.delta.push(BTreeMap::new());
        (id, true)
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = EstimateId> {
        (0..self.estimates.len()).map(EstimateId)
    }

    pub fn estimate(&self, q: EstimateId) -> &StateSet {
        &self.estimates[q.0]
    }

    pub fn find(&self, q: &StateSet) -> Option<EstimateId> {
        self.index.get(q).copied()
    }

    pub fn initials(&self) -> &[EstimateId] {
        &self.initials
    }

    pub fn alphabet(&self) -> &[Event] {
        &self.alphabet
    }

    pub fn step(&self, q: EstimateId, sigma: EventId) -> Option<EstimateId> {
        self.delta[q.0].get(&sigma).copied()
    }

    /// All `(q, σ, q')` triples, ordered by source then event.
    pub fn transitions(&self) -> impl Iterator<Item = (EstimateId, EventId, EstimateId)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .flat_map(|(q, m)| m.iter().map(move |(&e, &t)| (EstimateId(q), e, t)))
    }

    /// Names of the source states in an estimate.
    pub fn estimate_names(&self, q: EstimateId) -> Vec<String> {
        self.estimates[q.0]
            .iter()
            .map(|x| self.state_names[x.0].clone())
            .collect()
    }

    /// Canonical `{a,b}` rendering of an estimate.
    pub fn label(&self, q: EstimateId) -> String {
        format!("{{{}}}", self.estimate_names(q).join(","))
    }
}

/// The observer of `nfa`, started from the unobservable closure of its initial states.
pub fn subset_construction(nfa: &Nfa) -> Result<Observer> {
    if nfa.initial().is_empty() {
        return Err(Error::EmptyInitial);
    }
    let q0 = nfa.unobservable_reach(nfa.initial())?;
    Ok(Observer::explore(nfa, vec![q0]))
}

/// Subset construction from several initial estimates. Seeds must already be
/// closed under unobservable reach; duplicates are dropped but seeds that are
/// subsets of each other are kept apart.
pub fn multi_initial_observer(nfa: &Nfa, seeds: &[StateSet]) -> Result<Observer> {
    for seed in seeds {
        if seed.is_empty() {
            return Err(Error::EmptyEstimate);
        }
        let closed = nfa.unobservable_reach(seed)?;
        debug_assert_eq!(&closed, seed, "observer seed is not closed");
    }
    Ok(Observer::explore(nfa, seeds.to_vec()))
}

pub fn classify(q: &StateSet, secret: &StateSet) -> EstimateClass {
    let secret_part = q.iter().filter(|x| secret.contains(x)).count();
    if secret_part == q.len() {
        EstimateClass::Secret
    } else if secret_part == 0 {
        EstimateClass::NonSecret
    } else {
        EstimateClass::Hybrid
    }
}

pub fn classify_estimates(obs: &Observer, secret: &StateSet) -> BTreeMap<EstimateId, EstimateClass> {
    obs.ids().map(|q| (q, classify(obs.estimate(q), secret))).collect()
}
