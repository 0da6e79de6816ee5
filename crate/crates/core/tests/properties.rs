mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::nfa_from_seed;
use proptest::prelude::*;
use proptest::sample::subsequence;
use sbo_core::composition::{cc_dss, cc_full_observer, cc_hat};
use sbo_core::model::{parse_model, serialize_model};
use sbo_core::observer::subset_construction;
use sbo_core::oracle::BoundedRunSet;
use sbo_core::verification::effective_k_bound;
use sbo_core::{
    accessible_part, disable_transitions, enforce, natural_projection, verify, EnforcementOutcome, Event,
    NamedTransition, Notion, StateSet,
};

fn nfa() -> impl Strategy<Value = sbo_core::Nfa> {
    any::<u64>().prop_map(nfa_from_seed)
}

fn notion() -> impl Strategy<Value = Notion> {
    prop_oneof![
        (0u64..4).prop_map(Notion::KSso),
        Just(Notion::Cso),
        Just(Notion::Scso),
        Just(Notion::Siso),
        Just(Notion::InfSso),
    ]
}

fn alphabet() -> Vec<Event> {
    vec![
        Event::new("a", true, true),
        Event::new("b", true, false),
        Event::new("u", false, true),
    ]
}

fn word() -> impl Strategy<Value = Vec<&'static str>> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "u"]), 0..8)
}

proptest! {
    #[test]
    fn projection_is_a_monoid_morphism(s in word(), t in word()) {
        let st: Vec<&str> = s.iter().chain(&t).copied().collect();
        let mut parts = natural_projection(&s, &alphabet()).unwrap();
        parts.extend(natural_projection(&t, &alphabet()).unwrap());
        let whole = natural_projection(&st, &alphabet()).unwrap();
        prop_assert!(whole.len() <= st.len());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn unobservable_reach_is_a_closure(g in nfa(), mask in any::<u8>(), extra in any::<u8>()) {
        let pick = |m: u8| -> StateSet { g.states().filter(|x| m >> (x.0 % 8) & 1 == 1).collect() };
        let small = pick(mask);
        let large: StateSet = small.union(&pick(extra)).copied().collect();
        let ur_small = g.unobservable_reach(&small).unwrap();
        prop_assert!(ur_small.is_superset(&small));
        prop_assert_eq!(g.unobservable_reach(&ur_small).unwrap(), ur_small.clone());
        prop_assert!(g.unobservable_reach(&large).unwrap().is_superset(&ur_small));
    }

    #[test]
    fn accessible_part_is_idempotent(g in nfa()) {
        let once = accessible_part(&g);
        prop_assert_eq!(accessible_part(&once), once);
    }

    #[test]
    fn disabling_in_stages_equals_disabling_at_once(g in nfa(), split in any::<u32>()) {
        let controllable = g.controllable_transitions();
        let (first, second): (Vec<_>, Vec<_>) =
            controllable.iter().cloned().enumerate().partition(|(i, _)| split >> (i % 32) & 1 == 1);
        let first: BTreeSet<NamedTransition> = first.into_iter().map(|(_, t)| t).collect();
        let second: BTreeSet<NamedTransition> = second.into_iter().map(|(_, t)| t).collect();
        let both: BTreeSet<NamedTransition> = first.union(&second).cloned().collect();
        let staged = disable_transitions(&g, &first).unwrap();
        let remaining: BTreeSet<NamedTransition> =
            second.into_iter().filter(|t| staged.find_transition(t).is_some()).collect();
        prop_assert_eq!(disable_transitions(&staged, &remaining).unwrap(), disable_transitions(&g, &both).unwrap());
    }

    #[test]
    fn observer_estimates_are_exact(g in nfa()) {
        let obs = subset_construction(&g).unwrap();
        prop_assert!(obs.len() < 1 << g.num_states());

        // End states of every run, grouped by observation.
        let runs = BoundedRunSet::enumerate(&g, 8);
        let horizon = runs.horizon().unwrap();
        let mut reach: BTreeMap<Vec<String>, BTreeSet<String>> = BTreeMap::new();
        for run in runs.runs() {
            let events: Vec<&str> = run.events().collect();
            let word = natural_projection(&events, g.events()).unwrap();
            if word.len() <= horizon {
                reach.entry(word).or_default().insert(run.end().to_string());
            }
        }
        for (word, states) in reach {
            let mut q = Some(obs.initials()[0]);
            for sigma in &word {
                q = q.and_then(|q| obs.step(q, g.event_id(sigma).unwrap()));
            }
            let q = q.expect("observed words have estimates");
            let names: BTreeSet<String> = obs.estimate_names(q).into_iter().collect();
            prop_assert_eq!(names, states, "after {:?}", word);
        }
    }

    #[test]
    fn composition_states_are_consistent(g in nfa()) {
        let full = cc_full_observer(&g);
        for s in full.ids() {
            let st = full.state(s);
            let q = st.right.expect("the full observer never empties");
            prop_assert!(full.right().estimate(q).contains(&st.left));
        }
        for cc in [cc_hat(&g), cc_dss(&g)] {
            for t in cc.transitions() {
                prop_assert!(cc.left().find_transition(&cc.left().named(&cc.left_transition(t))).is_some());
                if cc.is_empty_right(t.source) {
                    prop_assert!(cc.is_empty_right(t.target));
                }
            }
        }
    }

    #[test]
    fn k_step_verdicts_are_monotone_and_capped(g in nfa(), k in 0u64..12) {
        let bound = effective_k_bound(&g);
        let at = |k| verify(&g, Notion::KSso(k)).opaque;
        prop_assert_eq!(at(k), at(k.min(bound)));
        if at(k + 1) {
            prop_assert!(at(k));
        }
        prop_assert_eq!(at(0), verify(&g, Notion::Cso).opaque);
    }

    #[test]
    fn witnesses_are_runs_of_the_system(g in nfa(), notion in notion()) {
        let v = verify(&g, notion);
        prop_assert_eq!(v.opaque, v.witness.is_none());
        if let Some(w) = v.witness {
            prop_assert!(g.is_run(&w.left), "{}", w.left);
        }
    }

    #[test]
    fn enforcement_outcomes_are_well_formed(g in nfa(), notion in notion()) {
        match enforce(&g, notion) {
            EnforcementOutcome::Enforced { disabled, subsystem } => {
                let controllable: BTreeSet<NamedTransition> = g.controllable_transitions().into_iter().collect();
                prop_assert!(disabled.is_subset(&controllable));
                prop_assert_eq!(&subsystem, &disable_transitions(&g, &disabled).unwrap());
                prop_assert!(verify(&subsystem, notion).opaque);
            }
            EnforcementOutcome::Impossible { witness } => {
                prop_assert!(g.is_run(&witness));
                for e in witness.events() {
                    prop_assert!(!g.is_controllable(g.event_id(e).unwrap()), "{}", witness);
                }
            }
        }
    }

    #[test]
    fn model_serialization_round_trips(g in nfa()) {
        prop_assert_eq!(parse_model(serialize_model(&g).as_bytes()).unwrap(), g);
    }

    #[test]
    fn disabled_transitions_are_absent(g in nfa(), pick in subsequence((0..16usize).collect::<Vec<_>>(), 0..4)) {
        let controllable = g.controllable_transitions();
        let cut: BTreeSet<NamedTransition> = pick.iter().filter_map(|&i| controllable.get(i).cloned()).collect();
        let sub = disable_transitions(&g, &cut).unwrap();
        for t in &cut {
            prop_assert!(sub.find_transition(t).is_none());
        }
        prop_assert!(sub.transitions().len() <= g.transitions().len());
    }
}
