//! Reference deciders on the shipped models, and agreement between the
//! word explorer and literal run enumeration.

mod common;

use common::{load, transitions};
use sbo_core::oracle::{
    min_leak_suffix, oracle_enforceable, oracle_holds, oracle_inf_sso, oracle_k_sso, oracle_scso, oracle_siso,
    violation_depth, BoundedRunSet,
};
use sbo_core::{disable_transitions, Notion};

const NOTIONS: [Notion; 5] = [
    Notion::KSso(1),
    Notion::KSso(2),
    Notion::Cso,
    Notion::Scso,
    Notion::Siso,
];

#[test]
fn fig1_k_step() {
    let g = load("fig1");
    assert!(oracle_k_sso(&g, 1, 12).unwrap());
    assert!(!oracle_k_sso(&g, 2, 12).unwrap());
    assert_eq!(min_leak_suffix(&g, 12), Ok(Some(2)));

    let runs = BoundedRunSet::enumerate(&g, 12);
    assert_eq!(runs.horizon(), Ok(5));
    assert!(runs.k_sso(1).unwrap());
    assert!(!runs.k_sso(2).unwrap());
}

#[test]
fn fig14_notions() {
    let g = load("fig14");
    assert!(!oracle_scso(&g, 10).unwrap());
    assert!(!oracle_siso(&g, 10).unwrap());
    assert!(!oracle_inf_sso(&g, 10).unwrap());

    let runs = BoundedRunSet::enumerate(&g, 10);
    assert_eq!(runs.horizon(), Ok(4));
    assert!(!runs.scso().unwrap());
    assert!(!runs.siso().unwrap());
    assert!(!runs.inf_sso().unwrap());

    let sub = disable_transitions(&g, &transitions(&["4 -a-> 7", "3 -a-> 5", "4 -a-> 5"])).unwrap();
    assert!(oracle_scso(&sub, 10).unwrap());
    assert!(BoundedRunSet::enumerate(&sub, 10).scso().unwrap());
}

#[test]
fn fig3_inf_step() {
    let g = load("fig3");
    assert!(!oracle_inf_sso(&g, 8).unwrap());
    let runs = BoundedRunSet::enumerate(&g, 8);
    assert_eq!(runs.horizon(), Ok(2));
    assert!(!runs.inf_sso().unwrap());
    for k in [0, 1, 5, 1000] {
        assert!(oracle_k_sso(&g, k, 8).unwrap());
    }
}

#[test]
fn fig7_cannot_be_enforced() {
    let g = load("fig7");
    assert_eq!(oracle_enforceable(&g, Notion::KSso(2), 16), Ok(None));
}

#[test]
fn fig14_siso_is_enforceable() {
    let g = load("fig14");
    let cut = oracle_enforceable(&g, Notion::Siso, 16).unwrap().expect("a cut exists");
    let sub = disable_transitions(&g, &cut).unwrap();
    assert!(oracle_siso(&sub, 16).unwrap());
}

#[test]
fn already_opaque_needs_no_cut() {
    let g = load("fig1");
    assert_eq!(
        oracle_enforceable(&g, Notion::KSso(1), 16),
        Ok(Some(Default::default()))
    );
}

/// Literal enumeration sees a violation exactly when the explorer finds one
/// within the enumeration horizon.
#[test]
fn explorer_matches_literal_enumeration_on_models() {
    for (name, cap) in [("fig1", 12), ("fig3", 8), ("fig7", 10), ("fig14", 10)] {
        let g = load(name);
        let runs = BoundedRunSet::enumerate(&g, cap);
        let horizon = runs.horizon().unwrap();
        for notion in NOTIONS.into_iter().chain([Notion::InfSso]) {
            let depth = violation_depth(&g, notion, 64).unwrap();
            let seen = depth.is_some_and(|d| d <= horizon);
            assert_eq!(runs.holds(notion).unwrap(), !seen, "{name} {notion}");
            assert_eq!(oracle_holds(&g, notion, 64).unwrap(), depth.is_none());
        }
    }
}
