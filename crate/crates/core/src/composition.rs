//! Concurrent composition of an automaton with an observer.
//!
//! A composition state pairs a concrete state of the left automaton with an
//! estimate of the right observer, or with the empty marker once the
//! observer can no longer follow the observation.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{accessible_part, EventId, Nfa, StateId, Transition};
use crate::error::{Error, Result};
use crate::observer::{classify, multi_initial_observer, subset_construction, EstimateClass, EstimateId, Observer};
use crate::subautomata::{dss_subautomaton, initial_secret_subautomaton, nonsecret_subautomaton};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CcStateId(pub usize);

/// `(left, right)`; `right == None` is the empty estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CcState {
    pub left: StateId,
    pub right: Option<EstimateId>,
}

/// `(σ,σ)` when `observable`, `(σ,ε)` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CcEvent {
    pub event: EventId,
    pub observable: bool,
}

impl CcEvent {
    pub fn right_event(&self) -> Option<EventId> {
        self.observable.then_some(self.event)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CcTransition {
    pub source: CcStateId,
    pub event: CcEvent,
    pub target: CcStateId,
}

#[derive(Clone, Debug)]
pub struct CcAutomaton {
    left: Nfa,
    right: Observer,
    states: Vec<CcState>,
    index: HashMap<CcState, CcStateId>,
    transitions: Vec<CcTransition>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    initials: Vec<CcStateId>,
}

impl CcAutomaton {
    pub fn left(&self) -> &Nfa {
        &self.left
    }

    pub fn right(&self) -> &Observer {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = CcStateId> {
        (0..self.states.len()).map(CcStateId)
    }

    pub fn state(&self, s: CcStateId) -> CcState {
        self.states[s.0]
    }

    pub fn find(&self, s: &CcState) -> Option<CcStateId> {
        self.index.get(s).copied()
    }

    pub fn initials(&self) -> &[CcStateId] {
        &self.initials
    }

    /// Initial states whose left component is secret (`X_cc,0^S`).
    pub fn secret_initials(&self) -> Vec<CcStateId> {
        self.initials
            .iter()
            .copied()
            .filter(|&s| self.left.is_secret(self.states[s.0].left))
            .collect()
    }

    pub fn is_empty_right(&self, s: CcStateId) -> bool {
        self.states[s.0].right.is_none()
    }

    pub fn empty_right_states(&self) -> Vec<CcStateId> {
        self.ids().filter(|&s| self.is_empty_right(s)).collect()
    }

    pub fn is_left_secret(&self, s: CcStateId) -> bool {
        self.left.is_secret(self.states[s.0].left)
    }

    pub fn transitions(&self) -> &[CcTransition] {
        &self.transitions
    }

    pub fn outgoing(&self, s: CcStateId) -> impl Iterator<Item = &CcTransition> + '_ {
        self.outgoing[s.0].iter().map(|&i| &self.transitions[i])
    }

    pub fn incoming(&self, s: CcStateId) -> impl Iterator<Item = &CcTransition> + '_ {
        self.incoming[s.0].iter().map(|&i| &self.transitions[i])
    }

    /// Observable cost of a transition: 1 for `(σ,σ)`, 0 for `(σ,ε)`.
    pub fn cost(t: &CcTransition) -> u64 {
        u64::from(t.event.observable)
    }

    pub fn is_controllable(&self, t: &CcTransition) -> bool {
        self.left.is_controllable(t.event.event)
    }

    /// The left-automaton transition underlying `t`.
    pub fn left_transition(&self, t: &CcTransition) -> Transition {
        Transition {
            source: self.states[t.source.0].left,
            event: t.event.event,
            target: self.states[t.target.0].left,
        }
    }

    /// Canonical `(x,{a,b})` or `(x,∅)` name.
    pub fn state_name(&self, s: CcStateId) -> String {
        let st = self.states[s.0];
        let left = self.left.state_name(st.left);
        match st.right {
            Some(q) => format!("({left},{})", self.right.label(q)),
            None => format!("({left},∅)"),
        }
    }

    pub fn find_by_name(&self, name: &str) -> Option<CcStateId> {
        self.ids().find(|&s| self.state_name(s) == name)
    }

    /// `(σ,σ)` or `(σ,ε)`.
    pub fn event_label(&self, e: &CcEvent) -> String {
        let name = &self.left.event(e.event).name;
        if e.observable {
            format!("({name},{name})")
        } else {
            format!("({name},ε)")
        }
    }
}

/// Product of `left` with `right` from `initials`. With `empty_sink`, an
/// observable move the observer cannot follow leads to the empty estimate;
/// without it the move is dropped.
pub fn product(left: &Nfa, right: &Observer, initials: &[CcState], empty_sink: bool) -> Result<CcAutomaton> {
    for (i, ev) in right.alphabet().iter().enumerate() {
        if !ev.observable {
            continue;
        }
        match left.events().get(i) {
            Some(l) if l.name == ev.name && l.observable => {}
            _ => return Err(Error::AlphabetMismatch(ev.name.clone())),
        }
    }
    let mut cc = CcAutomaton {
        left: left.clone(),
        right: right.clone(),
        states: Vec::new(),
        index: HashMap::new(),
        transitions: Vec::new(),
        outgoing: Vec::new(),
        incoming: Vec::new(),
        initials: Vec::new(),
    };
    let mut queue = VecDeque::new();
    for init in initials {
        if init.left.0 >= left.num_states() {
            return Err(Error::InvalidState(format!("#{}", init.left.0)));
        }
        if let Some(q) = init.right {
            if q.0 >= right.len() {
                return Err(Error::InvalidEstimate(q.0));
            }
        }
        let (id, fresh) = intern(&mut cc, *init);
        if fresh {
            queue.push_back(id);
        }
        if !cc.initials.contains(&id) {
            cc.initials.push(id);
        }
    }
    while let Some(s) = queue.pop_front() {
        let CcState { left: x, right: r } = cc.states[s.0];
        for t in left.outgoing(x) {
            let observable = left.is_observable(t.event);
            let next_right = match (observable, r) {
                (false, r) => r,
                (true, None) => None,
                (true, Some(q)) => match right.step(q, t.event) {
                    Some(q2) => Some(q2),
                    None if empty_sink => None,
                    None => continue,
                },
            };
            let (target, fresh) = intern(
                &mut cc,
                CcState {
                    left: t.target,
                    right: next_right,
                },
            );
            if fresh {
                queue.push_back(target);
            }
            let idx = cc.transitions.len();
            cc.transitions.push(CcTransition {
                source: s,
                event: CcEvent {
                    event: t.event,
                    observable,
                },
                target,
            });
            cc.outgoing[s.0].push(idx);
            cc.incoming[target.0].push(idx);
        }
    }
    Ok(cc)
}

fn intern(cc: &mut CcAutomaton, st: CcState) -> (CcStateId, bool) {
    if let Some(&id) = cc.index.get(&st) {
        return (id, false);
    }
    let id = CcStateId(cc.states.len());
    cc.states.push(st);
    cc.index.insert(st, id);
    cc.outgoing.push(Vec::new());
    cc.incoming.push(Vec::new());
    (id, true)
}

fn empty_observer(nfa: &Nfa) -> Observer {
    multi_initial_observer(nfa, &[]).expect("no seeds to validate")
}

/// `Cc(Ĝ, G̃_obs)`, whose empty-estimate states mark leaking-secret runs.
pub fn cc_hat(nfa: &Nfa) -> CcAutomaton {
    let g = accessible_part(nfa);
    let hat = initial_secret_subautomaton(&g);
    if g.initial().is_empty() || hat.is_empty() {
        return product(&hat, &empty_observer(&hat), &[], true).expect("empty product");
    }
    let obs = subset_construction(&g).expect("initial set is nonempty");
    let (tilde, seeds) = nonsecret_subautomaton(&g, &obs);
    let tilde_obs = multi_initial_observer(&tilde, &seeds).expect("seeds are nonempty and closed");
    let secret = g.secret_states();
    let mut initials = Vec::new();
    for q in obs.ids() {
        let est = obs.estimate(q);
        if classify(est, &secret) == EstimateClass::NonSecret {
            continue;
        }
        let nonsecret: Vec<&str> = est
            .iter()
            .filter(|x| !g.is_secret(**x))
            .map(|&x| g.state_name(x))
            .collect();
        let right = if nonsecret.is_empty() {
            None
        } else {
            let seed = tilde
                .state_set(&nonsecret)
                .expect("hybrid part survives in the non-secret subautomaton");
            Some(tilde_obs.find(&seed).expect("hybrid part is an observer seed"))
        };
        for &x in est.iter().filter(|x| g.is_secret(**x)) {
            let left = hat
                .state_id(g.state_name(x))
                .expect("secret states belong to the initial-secret subautomaton");
            let st = CcState { left, right };
            if !initials.contains(&st) {
                initials.push(st);
            }
        }
    }
    product(&hat, &tilde_obs, &initials, true).expect("subautomata share the alphabet")
}

/// `Cc(G, Obs(G))`, pairing each run with the current-state estimate of its observation.
pub fn cc_full_observer(nfa: &Nfa) -> CcAutomaton {
    let g = accessible_part(nfa);
    let Ok(obs) = subset_construction(&g) else {
        return product(&g, &empty_observer(&g), &[], false).expect("empty product");
    };
    let q0 = obs.initials()[0];
    let initials: Vec<CcState> = g
        .initial()
        .iter()
        .map(|&x| CcState {
            left: x,
            right: Some(q0),
        })
        .collect();
    product(&g, &obs, &initials, false).expect("observer of the same automaton")
}

/// `Cc(G, Obs(G_dss))`: runs of `G` paired with the estimate of matching
/// runs that never visit a secret state.
pub fn cc_dss(nfa: &Nfa) -> CcAutomaton {
    let g = accessible_part(nfa);
    let dss = dss_subautomaton(&g);
    let (obs, q0) = match subset_construction(&dss) {
        Ok(obs) => {
            let q0 = obs.initials()[0];
            (obs, Some(q0))
        }
        Err(_) => (empty_observer(&dss), None),
    };
    let initials: Vec<CcState> = g.initial().iter().map(|&x| CcState { left: x, right: q0 }).collect();
    product(&g, &obs, &initials, true).expect("subautomaton shares the alphabet")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaky() -> Nfa {
        Nfa::builder()
            .event("a", true, true)
            .event("b", true, true)
            .transition("0", "a", "1")
            .transition("0", "a", "2")
            .transition("1", "b", "1")
            .initial("0")
            .secret("1")
            .build()
            .unwrap()
    }

    #[test]
    fn left_without_transitions_yields_initials_only() {
        let nfa = Nfa::builder()
            .event("a", true, true)
            .state("0")
            .initial("0")
            .build()
            .unwrap();
        let cc = cc_full_observer(&nfa);
        assert_eq!(cc.len(), 1);
        assert!(cc.transitions().is_empty());
        assert_eq!(cc.state_name(CcStateId(0)), "(0,{0})");
    }

    #[test]
    fn no_secret_means_empty_cc_hat() {
        let nfa = Nfa::builder()
            .event("a", true, true)
            .transition("0", "a", "0")
            .initial("0")
            .build()
            .unwrap();
        assert!(cc_hat(&nfa).is_empty());
    }

    #[test]
    fn cc_hat_reaches_empty_through_sink() {
        let cc = cc_hat(&leaky());
        let names: Vec<String> = cc.ids().map(|s| cc.state_name(s)).collect();
        assert_eq!(names, ["(1,{2})", "(1,∅)"]);
        assert_eq!(cc.event_label(&cc.transitions()[0].event), "(b,b)");
    }

    #[test]
    fn cc_dss_with_secret_initial_only_starts_empty() {
        let nfa = Nfa::builder()
            .event("a", true, true)
            .transition("0", "a", "0")
            .initial("0")
            .secret("0")
            .build()
            .unwrap();
        let cc = cc_dss(&nfa);
        assert_eq!(cc.len(), 1);
        assert!(cc.is_empty_right(CcStateId(0)));
        assert_eq!(cc.secret_initials(), vec![CcStateId(0)]);
    }

    #[test]
    fn mismatched_alphabets_are_rejected() {
        let left = Nfa::builder()
            .event("a", true, true)
            .state("0")
            .initial("0")
            .build()
            .unwrap();
        let other = Nfa::builder()
            .event("b", true, true)
            .state("0")
            .initial("0")
            .build()
            .unwrap();
        let obs = subset_construction(&other).unwrap();
        let init = [CcState {
            left: StateId(0),
            right: Some(EstimateId(0)),
        }];
        assert!(matches!(
            product(&left, &obs, &init, true),
            Err(Error::AlphabetMismatch(_))
        ));
        let own = subset_construction(&left).unwrap();
        let bad = [CcState {
            left: StateId(0),
            right: Some(EstimateId(5)),
        }];
        assert_eq!(product(&left, &own, &bad, true).unwrap_err(), Error::InvalidEstimate(5));
    }
}
