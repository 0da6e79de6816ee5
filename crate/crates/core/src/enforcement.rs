//! Enforcement of opacity by disabling controllable transitions.
//!
//! Each procedure rebuilds the relevant composition of the current
//! subsystem, disables the last controllable transition of every offending
//! run, and repeats until no violation remains or an offending run turns out
//! to be entirely uncontrollable.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use crate::automaton::{accessible_part, disable_transitions, NamedTransition, Nfa, Run};
use crate::composition::{cc_dss, cc_full_observer, cc_hat, CcAutomaton, CcStateId, CcTransition};
use crate::verification::{cc_run, Notion, Paths};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnforcementOutcome {
    Enforced {
        disabled: BTreeSet<NamedTransition>,
        subsystem: Nfa,
    },
    /// No choice of disabled transitions works; `witness` is a leaking run
    /// made of uncontrollable events only.
    Impossible { witness: Run },
}

impl EnforcementOutcome {
    pub fn is_enforced(&self) -> bool {
        matches!(self, EnforcementOutcome::Enforced { .. })
    }

    pub fn disabled(&self) -> Option<&BTreeSet<NamedTransition>> {
        match self {
            EnforcementOutcome::Enforced { disabled, .. } => Some(disabled),
            EnforcementOutcome::Impossible { .. } => None,
        }
    }
}

/// Minimal observable distance from every state to a target set using
/// uncontrollable transitions only.
struct UncontrollableReach {
    dist: Vec<Option<(u64, u64)>>,
    next: Vec<Option<CcTransition>>,
}

impl UncontrollableReach {
    fn compute(cc: &CcAutomaton, targets: &BTreeSet<CcStateId>) -> Self {
        let mut dist = vec![None; cc.len()];
        let mut next = vec![None; cc.len()];
        let mut heap = BinaryHeap::new();
        for &s in targets {
            dist[s.0] = Some((0, 0));
            heap.push(Reverse((0u64, 0u64, s)));
        }
        while let Some(Reverse((obs, steps, s))) = heap.pop() {
            if dist[s.0] != Some((obs, steps)) {
                continue;
            }
            for t in cc.incoming(s) {
                if cc.is_controllable(t) {
                    continue;
                }
                let cand = (obs + CcAutomaton::cost(t), steps + 1);
                if dist[t.source.0].map_or(true, |d| cand < d) {
                    dist[t.source.0] = Some(cand);
                    next[t.source.0] = Some(*t);
                    heap.push(Reverse((cand.0, cand.1, t.source)));
                }
            }
        }
        UncontrollableReach { dist, next }
    }

    fn obs(&self, s: CcStateId) -> Option<u64> {
        self.dist[s.0].map(|d| d.0)
    }

    fn path_from(&self, s: CcStateId) -> Vec<CcTransition> {
        let mut path = Vec::new();
        let mut cur = s;
        while let Some(t) = self.next[cur.0] {
            path.push(t);
            cur = t.target;
        }
        path
    }

    /// The source with the smallest distance, if any reaches the targets
    /// within `budget`.
    fn closest(&self, sources: &[CcStateId], budget: Option<u64>) -> Option<CcStateId> {
        sources
            .iter()
            .filter_map(|&s| self.dist[s.0].map(|d| (d, s)))
            .filter(|(d, _)| budget.map_or(true, |k| d.0 <= k))
            .min()
            .map(|(_, s)| s)
    }
}

fn frontier_from(
    cc: &CcAutomaton,
    sources: &[CcStateId],
    bad: &BTreeSet<CcStateId>,
    budget: Option<u64>,
) -> BTreeSet<CcTransition> {
    if bad.is_empty() {
        return BTreeSet::new();
    }
    let fwd = Paths::compute(cc, sources, |s| !bad.contains(&s), |_| true);
    let back = UncontrollableReach::compute(cc, bad);
    cc.transitions()
        .iter()
        .filter(|t| cc.is_controllable(t) && !bad.contains(&t.source))
        .filter(|t| match (fwd.obs(t.source), back.obs(t.target)) {
            (Some(d), Some(u)) => {
                budget.map_or(true, |k| d.saturating_add(CcAutomaton::cost(t)).saturating_add(u) <= k)
            }
            _ => false,
        })
        .copied()
        .collect()
}

/// Controllable transitions that are the last controllable step of some run
/// from the initial states into `bad`, within `budget` observable steps when
/// given. Runs are considered up to their first visit of `bad`.
pub fn last_controllable_frontier(
    cc: &CcAutomaton,
    bad: &BTreeSet<CcStateId>,
    budget: Option<u64>,
) -> BTreeSet<CcTransition> {
    frontier_from(cc, cc.initials(), bad, budget)
}

fn left_cut(cc: &CcAutomaton, frontier: &BTreeSet<CcTransition>) -> BTreeSet<NamedTransition> {
    frontier
        .iter()
        .map(|t| cc.left().named(&cc.left_transition(t)))
        .collect()
}

fn finish(nfa: &Nfa, disabled: BTreeSet<NamedTransition>) -> EnforcementOutcome {
    let subsystem =
        disable_transitions(nfa, &disabled).expect("disabled transitions are controllable transitions of the input");
    EnforcementOutcome::Enforced { disabled, subsystem }
}

fn apply(current: &Nfa, cut: &BTreeSet<NamedTransition>) -> Nfa {
    assert!(!cut.is_empty(), "enforcement round made no progress");
    disable_transitions(current, cut).expect("frontier transitions are controllable")
}

/// Names of the non-secret states of the right component of `s`.
fn nonsecret_estimate(cc: &CcAutomaton, s: CcStateId) -> BTreeSet<String> {
    match cc.state(s).right {
        None => BTreeSet::new(),
        Some(q) => cc
            .right()
            .estimate(q)
            .iter()
            .filter(|&&x| !cc.left().is_secret(x))
            .map(|&x| cc.left().state_name(x).to_string())
            .collect(),
    }
}

/// Enforces strong K-step opacity.
pub fn enforce_k_sso(nfa: &Nfa, k: u64) -> EnforcementOutcome {
    let mut current = accessible_part(nfa);
    let mut disabled = BTreeSet::new();
    loop {
        let hat = cc_hat(&current);
        let bad: BTreeSet<CcStateId> = hat.empty_right_states().into_iter().collect();
        let fwd = Paths::compute(&hat, hat.initials(), |s| !bad.contains(&s), |_| true);
        if !bad.iter().any(|&s| fwd.obs(s).map_or(false, |d| d <= k)) {
            return finish(nfa, disabled);
        }
        let back = UncontrollableReach::compute(&hat, &bad);
        let mut cut = left_cut(&hat, &frontier_from(&hat, hat.initials(), &bad, Some(k)));

        let leaking: Vec<CcStateId> = hat
            .initials()
            .iter()
            .copied()
            .filter(|&s| back.obs(s).map_or(false, |d| d <= k))
            .collect();
        if !leaking.is_empty() {
            let full = cc_full_observer(&current);
            let keys: Vec<(String, BTreeSet<String>)> = leaking
                .iter()
                .map(|&s| {
                    let x = hat.left().state_name(hat.state(s).left).to_string();
                    let q = match hat.state(s).right {
                        None => BTreeSet::new(),
                        Some(q) => hat.right().estimate_names(q).into_iter().collect(),
                    };
                    (x, q)
                })
                .collect();
            let mut marked = BTreeSet::new();
            let mut origin = Vec::new();
            for m in full.ids() {
                let x = full.left().state_name(full.state(m).left).to_string();
                let q = nonsecret_estimate(&full, m);
                if let Some(i) = keys.iter().position(|(kx, kq)| *kx == x && *kq == q) {
                    marked.insert(m);
                    origin.push((m, leaking[i]));
                }
            }
            let to_marked = UncontrollableReach::compute(&full, &marked);
            if let Some(s0) = to_marked.closest(full.initials(), None) {
                let prefix = to_marked.path_from(s0);
                let m = prefix.last().map_or(s0, |t| t.target);
                let i = origin
                    .iter()
                    .find(|(mm, _)| *mm == m)
                    .map(|(_, i)| *i)
                    .expect("marked state has an origin");
                let mut witness = cc_run(&full, s0, &prefix).left;
                witness.extend(&cc_run(&hat, i, &back.path_from(i)).left);
                return EnforcementOutcome::Impossible { witness };
            }
            cut.extend(left_cut(&full, &frontier_from(&full, full.initials(), &marked, None)));
        }
        current = apply(&current, &cut);
        disabled.extend(cut);
    }
}

fn enforce_on_dss(nfa: &Nfa, notion: Notion) -> EnforcementOutcome {
    let mut current = accessible_part(nfa);
    let mut disabled = BTreeSet::new();
    loop {
        let cc = cc_dss(&current);
        let sources = match notion {
            Notion::Siso => cc.secret_initials(),
            _ => cc.initials().to_vec(),
        };
        let reach = Paths::compute(&cc, &sources, |_| true, |_| true);
        let bad: BTreeSet<CcStateId> = cc
            .empty_right_states()
            .into_iter()
            .filter(|&s| reach.obs(s).is_some())
            .filter(|&s| notion != Notion::Scso || cc.is_left_secret(s))
            .collect();
        if bad.is_empty() {
            return finish(nfa, disabled);
        }
        let back = UncontrollableReach::compute(&cc, &bad);
        if let Some(s0) = back.closest(&sources, None) {
            let witness = cc_run(&cc, s0, &back.path_from(s0)).left;
            return EnforcementOutcome::Impossible { witness };
        }
        let cut = left_cut(&cc, &frontier_from(&cc, &sources, &bad, None));
        current = apply(&current, &cut);
        disabled.extend(cut);
    }
}

/// Enforces strong current-state opacity.
pub fn enforce_scso(nfa: &Nfa) -> EnforcementOutcome {
    enforce_on_dss(nfa, Notion::Scso)
}

/// Enforces strong initial-state opacity.
pub fn enforce_siso(nfa: &Nfa) -> EnforcementOutcome {
    enforce_on_dss(nfa, Notion::Siso)
}

/// Enforces strong infinite-step opacity.
pub fn enforce_inf_sso(nfa: &Nfa) -> EnforcementOutcome {
    enforce_on_dss(nfa, Notion::InfSso)
}

/// Dispatches on `notion`; CSO is enforced as 0-step strong opacity.
pub fn enforce(nfa: &Nfa, notion: Notion) -> EnforcementOutcome {
    match notion {
        Notion::KSso(k) => enforce_k_sso(nfa, k),
        Notion::Cso => enforce_k_sso(nfa, 0),
        Notion::Scso => enforce_scso(nfa),
        Notion::Siso => enforce_siso(nfa),
        Notion::InfSso => enforce_inf_sso(nfa),
    }
}
