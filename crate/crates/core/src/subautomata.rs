//! Derived systems consumed by the compositions.
//!
//! All three keep the full alphabet of their source, so event ids agree
//! across an automaton and its subautomata.

use crate::automaton::{Nfa, StateSet};
use crate::observer::{classify, EstimateClass, Observer};

/// `Ĝ`: the accessible part of `nfa` when started from its secret states.
pub fn initial_secret_subautomaton(nfa: &Nfa) -> Nfa {
    let secret = nfa.secret_states();
    let keep = nfa.reachable_from(&secret, |_| true);
    nfa.restrict(&keep, &secret, |_| true)
}

/// `G̃` together with the observer seeds `q ∩ X_NS` of every hybrid estimate
/// of `obs`, expressed over `G̃`'s own state ids.
///
/// `obs` must be the observer of `nfa`.
pub fn nonsecret_subautomaton(nfa: &Nfa, obs: &Observer) -> (Nfa, Vec<StateSet>) {
    let secret = nfa.secret_states();
    let mut parts: Vec<StateSet> = Vec::new();
    for q in obs.ids() {
        let q = obs.estimate(q);
        if classify(q, &secret) == EstimateClass::Hybrid {
            let part: StateSet = q.iter().filter(|x| !nfa.is_secret(**x)).copied().collect();
            if !parts.contains(&part) {
                parts.push(part);
            }
        }
    }
    let roots: StateSet = parts.iter().flatten().copied().collect();
    let nonsecret = |t: &crate::automaton::Transition| !nfa.is_secret(t.source) && !nfa.is_secret(t.target);
    let keep = nfa.reachable_from(&roots, nonsecret);
    let tilde = nfa.restrict(&keep, &roots, nonsecret);

    let seeds: Vec<StateSet> = parts
        .iter()
        .map(|part| {
            let names = nfa.names(part);
            tilde
                .state_set(&names)
                .expect("seed states survive in the non-secret subautomaton")
        })
        .filter(|seed| !seed.is_empty())
        .collect();
    for seed in &seeds {
        let closed = tilde
            .unobservable_reach(seed)
            .expect("seed states belong to the subautomaton");
        assert_eq!(
            &closed, seed,
            "hybrid seed is not closed in the non-secret subautomaton"
        );
    }
    (tilde, seeds)
}

/// `G_dss`: secret states deleted, accessible from the non-secret initial states.
pub fn dss_subautomaton(nfa: &Nfa) -> Nfa {
    let initial: StateSet = nfa.initial().iter().filter(|x| !nfa.is_secret(**x)).copied().collect();
    let nonsecret = |t: &crate::automaton::Transition| !nfa.is_secret(t.source) && !nfa.is_secret(t.target);
    let keep = nfa.reachable_from(&initial, nonsecret);
    nfa.restrict(&keep, &initial, nonsecret)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::accessible_part;
    use crate::observer::subset_construction;

    fn sample(secret: &[&str]) -> Nfa {
        let mut b = Nfa::builder()
            .event("a", true, true)
            .event("u", false, true)
            .transition("0", "a", "1")
            .transition("0", "u", "2")
            .transition("2", "a", "3")
            .initial("0");
        for s in secret {
            b = b.secret(*s);
        }
        b.build().unwrap()
    }

    #[test]
    fn no_secret_gives_empty_hat_and_tilde() {
        let nfa = sample(&[]);
        assert!(initial_secret_subautomaton(&nfa).is_empty());
        let obs = subset_construction(&nfa).unwrap();
        let (tilde, seeds) = nonsecret_subautomaton(&nfa, &obs);
        assert!(tilde.is_empty());
        assert!(seeds.is_empty());
        assert_eq!(dss_subautomaton(&nfa), accessible_part(&nfa));
    }

    #[test]
    fn secret_initial_only_gives_accessible_part() {
        let nfa = sample(&["0"]);
        assert_eq!(initial_secret_subautomaton(&nfa).num_states(), nfa.num_states());
        assert!(dss_subautomaton(&nfa).is_empty());
    }

    #[test]
    fn tilde_has_no_secret_states() {
        let nfa = sample(&["2"]);
        let obs = subset_construction(&nfa).unwrap();
        let (tilde, seeds) = nonsecret_subautomaton(&nfa, &obs);
        assert!(tilde.secret_states().is_empty());
        assert_eq!(seeds, vec![tilde.state_set(&["0"]).unwrap()]);
        assert_eq!(tilde.names(&tilde.states().collect()), ["0", "1"]);
    }
}
