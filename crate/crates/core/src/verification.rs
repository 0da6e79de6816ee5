//! Opacity decision procedures over the concurrent compositions.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use crate::automaton::{accessible_part, Nfa, Run};
use crate::composition::{cc_dss, cc_full_observer, cc_hat, CcAutomaton, CcStateId, CcTransition};
use crate::subautomata::initial_secret_subautomaton;

/// The opacity notions this crate decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Notion {
    /// Strong K-step opacity.
    KSso(u64),
    /// Current-state opacity; coincides with 0-step strong opacity.
    Cso,
    /// Strong current-state opacity.
    Scso,
    /// Strong initial-state opacity.
    Siso,
    /// Strong infinite-step opacity.
    InfSso,
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Notion::KSso(k) => write!(f, "{k}-SSO"),
            Notion::Cso => write!(f, "CSO"),
            Notion::Scso => write!(f, "SCSO"),
            Notion::Siso => write!(f, "SISO"),
            Notion::InfSso => write!(f, "Inf-SSO"),
        }
    }
}

/// A run through a composition, by canonical state names and event labels,
/// together with its left projection as a run of the underlying automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcRun {
    pub states: Vec<String>,
    pub labels: Vec<String>,
    pub left: Run,
}

impl CcRun {
    pub fn end(&self) -> &str {
        self.states.last().map(String::as_str).unwrap_or("")
    }

    /// Number of `(σ,σ)` steps.
    pub fn observable_len(&self) -> usize {
        self.labels.iter().filter(|l| !l.ends_with(",ε)")).count()
    }
}

impl fmt::Display for CcRun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(first) = self.states.first() {
            write!(f, "{first}")?;
        }
        for (label, state) in self.labels.iter().zip(self.states.iter().skip(1)) {
            write!(f, " -{label}-> {state}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub opaque: bool,
    pub notion: Notion,
    pub witness: Option<CcRun>,
}

impl Verdict {
    fn holds(notion: Notion) -> Self {
        Verdict {
            opaque: true,
            notion,
            witness: None,
        }
    }

    fn fails(notion: Notion, witness: CcRun) -> Self {
        Verdict {
            opaque: false,
            notion,
            witness: Some(witness),
        }
    }
}

/// Shortest paths in a composition ordered by (observable length, step count).
pub(crate) struct Paths {
    pub dist: Vec<Option<(u64, u64)>>,
    parent: Vec<Option<CcTransition>>,
}

impl Paths {
    /// Dijkstra from `sources`, following only transitions accepted by
    /// `allow` and leaving states rejected by `expand` as dead ends. Ties are
    /// broken by state index so results are deterministic.
    pub fn compute(
        cc: &CcAutomaton,
        sources: &[CcStateId],
        expand: impl Fn(CcStateId) -> bool,
        allow: impl Fn(&CcTransition) -> bool,
    ) -> Paths {
        let mut dist = vec![None; cc.len()];
        let mut parent = vec![None; cc.len()];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            if dist[s.0].is_none() {
                dist[s.0] = Some((0, 0));
                heap.push(Reverse((0u64, 0u64, s)));
            }
        }
        while let Some(Reverse((obs, steps, s))) = heap.pop() {
            if dist[s.0] != Some((obs, steps)) || !expand(s) {
                continue;
            }
            for t in cc.outgoing(s) {
                if !allow(t) {
                    continue;
                }
                let cand = (obs + CcAutomaton::cost(t), steps + 1);
                if dist[t.target.0].map_or(true, |d| cand < d) {
                    dist[t.target.0] = Some(cand);
                    parent[t.target.0] = Some(*t);
                    heap.push(Reverse((cand.0, cand.1, t.target)));
                }
            }
        }
        Paths { dist, parent }
    }

    pub fn obs(&self, s: CcStateId) -> Option<u64> {
        self.dist[s.0].map(|d| d.0)
    }

    /// Transitions of the recorded shortest path ending at `s`.
    pub fn path_to(&self, s: CcStateId) -> Vec<CcTransition> {
        let mut path = Vec::new();
        let mut cur = s;
        while let Some(t) = self.parent[cur.0] {
            path.push(t);
            cur = t.source;
        }
        path.reverse();
        path
    }

    /// Closest state in `targets` by (observable length, steps, index).
    pub fn nearest(&self, targets: impl IntoIterator<Item = CcStateId>) -> Option<CcStateId> {
        targets
            .into_iter()
            .filter_map(|s| self.dist[s.0].map(|d| (d, s)))
            .min()
            .map(|(_, s)| s)
    }
}

pub(crate) fn cc_run(cc: &CcAutomaton, start: CcStateId, path: &[CcTransition]) -> CcRun {
    let left = cc.left();
    let mut run = Run::new(left.state_name(cc.state(start).left));
    let mut states = vec![cc.state_name(start)];
    let mut labels = Vec::with_capacity(path.len());
    for t in path {
        labels.push(cc.event_label(&t.event));
        states.push(cc.state_name(t.target));
        run.push(
            left.event(t.event.event).name.as_str(),
            left.state_name(cc.state(t.target).left),
        );
    }
    CcRun {
        states,
        labels,
        left: run,
    }
}

fn witness_to(cc: &CcAutomaton, paths: &Paths, target: CcStateId) -> CcRun {
    let path = paths.path_to(target);
    let start = path.first().map_or(target, |t| t.source);
    cc_run(cc, start, &path)
}

/// States of `cc` observationally reachable from its initials within `budget`
/// observable steps, with their minimal observable distance.
pub fn observational_reach_within(cc: &CcAutomaton, budget: u64) -> BTreeMap<CcStateId, u64> {
    let paths = Paths::compute(cc, cc.initials(), |_| true, |_| true);
    cc.ids()
        .filter_map(|s| paths.obs(s).filter(|&d| d <= budget).map(|d| (s, d)))
        .collect()
}

/// `|X̂|·2^{|X\X_S|} − 1` on the accessible part, saturating; 0 without secrets.
pub fn effective_k_bound(nfa: &Nfa) -> u64 {
    let g = accessible_part(nfa);
    let hat = initial_secret_subautomaton(&g).num_states() as u128;
    if hat == 0 {
        return 0;
    }
    let nonsecret = g.nonsecret_states().len() as u32;
    if nonsecret >= 64 {
        return u64::MAX;
    }
    let bound = (hat << nonsecret) - 1;
    u64::try_from(bound).unwrap_or(u64::MAX)
}

pub fn verify_cso(nfa: &Nfa) -> Verdict {
    let cc = cc_full_observer(nfa);
    let all_secret = |s: CcStateId| {
        let st = cc.state(s);
        st.right.map_or(false, |q| {
            cc.right().estimate(q).iter().all(|&x| cc.left().is_secret(x))
        })
    };
    let paths = Paths::compute(&cc, cc.initials(), |_| true, |_| true);
    match paths.nearest(cc.ids().filter(|&s| all_secret(s))) {
        Some(target) => Verdict::fails(Notion::Cso, witness_to(&cc, &paths, target)),
        None => Verdict::holds(Notion::Cso),
    }
}

/// Strong K-step opacity, with `k` capped at [`effective_k_bound`].
pub fn verify_k_sso(nfa: &Nfa, k: u64) -> Verdict {
    let notion = Notion::KSso(k);
    let cso = verify_cso(nfa);
    if !cso.opaque {
        return Verdict { notion, ..cso };
    }
    let budget = k.min(effective_k_bound(nfa));
    let cc = cc_hat(nfa);
    let paths = Paths::compute(&cc, cc.initials(), |_| true, |_| true);
    let leaks = cc
        .empty_right_states()
        .into_iter()
        .filter(|&s| paths.obs(s).map_or(false, |d| d <= budget));
    match paths.nearest(leaks) {
        Some(target) => Verdict::fails(notion, witness_to(&cc, &paths, target)),
        None => Verdict::holds(notion),
    }
}

fn verify_on_dss(nfa: &Nfa, notion: Notion) -> Verdict {
    let cc = cc_dss(nfa);
    let sources = match notion {
        Notion::Siso => cc.secret_initials(),
        _ => cc.initials().to_vec(),
    };
    let paths = Paths::compute(&cc, &sources, |_| true, |_| true);
    let bad = cc
        .empty_right_states()
        .into_iter()
        .filter(|&s| notion != Notion::Scso || cc.is_left_secret(s));
    match paths.nearest(bad) {
        Some(target) => Verdict::fails(notion, witness_to(&cc, &paths, target)),
        None => Verdict::holds(notion),
    }
}

pub fn verify_scso(nfa: &Nfa) -> Verdict {
    verify_on_dss(nfa, Notion::Scso)
}

pub fn verify_siso(nfa: &Nfa) -> Verdict {
    verify_on_dss(nfa, Notion::Siso)
}

pub fn verify_inf_sso(nfa: &Nfa) -> Verdict {
    verify_on_dss(nfa, Notion::InfSso)
}

pub fn verify(nfa: &Nfa, notion: Notion) -> Verdict {
    match notion {
        Notion::KSso(k) => verify_k_sso(nfa, k),
        Notion::Cso => verify_cso(nfa),
        Notion::Scso => verify_scso(nfa),
        Notion::Siso => verify_siso(nfa),
        Notion::InfSso => verify_inf_sso(nfa),
    }
}
