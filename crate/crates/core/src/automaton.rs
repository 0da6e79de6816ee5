//! Partially observed, partially controllable nondeterministic automata.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Index of a state inside one [`Nfa`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

/// Index of an event inside one [`Nfa`]'s alphabet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

pub type StateSet = BTreeSet<StateId>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub name: String,
    pub observable: bool,
    pub controllable: bool,
}

impl Event {
    pub fn new(name: impl Into<String>, observable: bool, controllable: bool) -> Self {
        Event {
            name: name.into(),
            observable,
            controllable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transition {
    pub source: StateId,
    pub event: EventId,
    pub target: StateId,
}

/// A transition identified by names, stable across subsystems of one model.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NamedTransition {
    pub from: String,
    pub event: String,
    pub to: String,
}

impl NamedTransition {
    pub fn new(from: impl Into<String>, event: impl Into<String>, to: impl Into<String>) -> Self {
        NamedTransition {
            from: from.into(),
            event: event.into(),
            to: to.into(),
        }
    }
}

impl fmt::Display for NamedTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.from, self.event, self.to)
    }
}

impl FromStr for NamedTransition {
    type Err = Error;

    /// Parses the `from -event-> to` form produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownTransition(s.to_string());
        let (from, rest) = s.split_once(" -").ok_or_else(bad)?;
        let (event, to) = rest.split_once("-> ").ok_or_else(bad)?;
        if from.is_empty() || event.is_empty() || to.is_empty() {
            return Err(bad());
        }
        Ok(NamedTransition::new(from, event, to))
    }
}

/// A run `start -e1-> x1 -e2-> x2 ...`, by state and event names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub start: String,
    pub steps: Vec<(String, String)>,
}

impl Run {
    pub fn new(start: impl Into<String>) -> Self {
        Run {
            start: start.into(),
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, event: impl Into<String>, target: impl Into<String>) {
        self.steps.push((event.into(), target.into()));
    }

    pub fn end(&self) -> &str {
        self.steps.last().map_or(&self.start, |(_, x)| x)
    }

    pub fn events(&self) -> impl Iterator<Item = &str> {
        self.steps.iter().map(|(e, _)| e.as_str())
    }

    pub fn states(&self) -> impl Iterator<Item = &str> {
        std::iter::once(self.start.as_str()).chain(self.steps.iter().map(|(_, x)| x.as_str()))
    }

    pub fn transitions(&self) -> Vec<NamedTransition> {
        let mut from = self.start.as_str();
        let mut out = Vec::with_capacity(self.steps.len());
        for (e, to) in &self.steps {
            out.push(NamedTransition::new(from, e.as_str(), to.as_str()));
            from = to;
        }
        out
    }

    /// Concatenates `other`, which must start where `self` ends.
    pub fn extend(&mut self, other: &Run) {
        debug_assert_eq!(self.end(), other.start);
        self.steps.extend(other.steps.iter().cloned());
    }
}

impl fmt::Display for Run {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (e, x) in &self.steps {
            write!(f, " -{e}-> {x}")?;
        }
        Ok(())
    }
}

/// Orders names numerically when both are integers, lexically otherwise.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u128>(), b.parse::<u128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// An NFA `(X, Σ, δ, X0)` with secret states `X_S`.
///
/// States are kept in natural name order and events in name order, so two
/// automata with the same content compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    events: Vec<Event>,
    event_index: HashMap<String, EventId>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
    initial: StateSet,
    secret: Vec<bool>,
}

/// Incremental construction of an [`Nfa`]. States are declared implicitly by
/// any mention; events must be declared before `build`.
#[derive(Clone, Debug, Default)]
pub struct NfaBuilder {
    states: Vec<String>,
    events: Vec<Event>,
    transitions: Vec<(String, String, String)>,
    initial: Vec<String>,
    secret: Vec<String>,
}

impl NfaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn event(mut self, name: impl Into<String>, observable: bool, controllable: bool) -> Self {
        self.events.push(Event::new(name, observable, controllable));
        self
    }

    pub fn transition(mut self, from: impl Into<String>, event: impl Into<String>, to: impl Into<String>) -> Self {
        self.transitions.push((from.into(), event.into(), to.into()));
        self
    }

    pub fn initial(mut self, name: impl Into<String>) -> Self {
        self.initial.push(name.into());
        self
    }

    pub fn secret(mut self, name: impl Into<String>) -> Self {
        self.secret.push(name.into());
        self
    }

    pub fn build(self) -> Result<Nfa> {
        let mut names: Vec<String> = self.states;
        names.extend(self.initial.iter().cloned());
        names.extend(self.secret.iter().cloned());
        for (from, _, to) in &self.transitions {
            names.push(from.clone());
            names.push(to.clone());
        }
        names.sort_by(|a, b| natural_cmp(a, b));
        names.dedup();
        let state_index: HashMap<String, StateId> =
            names.iter().enumerate().map(|(i, n)| (n.clone(), StateId(i))).collect();

        let mut events = self.events;
        events.sort_by(|a, b| a.name.cmp(&b.name));
        for pair in events.windows(2) {
            if pair[0].name == pair[1].name {
                return Err(Error::DuplicateEvent(pair[0].name.clone()));
            }
        }
        let event_index: HashMap<String, EventId> = events
            .iter()
            .enumerate()
            .map(|(i, e)| (e.name.clone(), EventId(i)))
            .collect();

        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (from, event, to) in &self.transitions {
            let event = *event_index
                .get(event)
                .ok_or_else(|| Error::InvalidEvent(event.clone()))?;
            transitions.push(Transition {
                source: state_index[from],
                event,
                target: state_index[to],
            });
        }
        let initial = self.initial.iter().map(|n| state_index[n]).collect();
        let mut secret = vec![false; names.len()];
        for n in &self.secret {
            secret[state_index[n].0] = true;
        }
        Ok(Nfa::assemble(
            names,
            state_index,
            events,
            event_index,
            transitions,
            initial,
            secret,
        ))
    }
}

impl Nfa {
    pub fn builder() -> NfaBuilder {
        NfaBuilder::new()
    }

    fn assemble(
        states: Vec<String>,
        state_index: HashMap<String, StateId>,
        events: Vec<Event>,
        event_index: HashMap<String, EventId>,
        mut transitions: Vec<Transition>,
        initial: StateSet,
        secret: Vec<bool>,
    ) -> Nfa {
        transitions.sort_unstable();
        transitions.dedup();
        let mut outgoing = vec![Vec::new(); states.len()];
        let mut incoming = vec![Vec::new(); states.len()];
        for (i, t) in transitions.iter().enumerate() {
            outgoing[t.source.0].push(i);
            incoming[t.target.0].push(i);
        }
        Nfa {
            states,
            state_index,
            events,
            event_index,
            transitions,
            outgoing,
            incoming,
            initial,
            secret,
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.states[x.0]
    }

    pub fn state_id(&self, name: &str) -> Result<StateId> {
        self.state_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidState(name.to_string()))
    }

    /// Resolves a list of state names to a set of ids.
    pub fn state_set<S: AsRef<str>>(&self, names: &[S]) -> Result<StateSet> {
        names.iter().map(|n| self.state_id(n.as_ref())).collect()
    }

    /// Names of the states in `set`, in natural order.
    pub fn names(&self, set: &StateSet) -> Vec<String> {
        set.iter().map(|&x| self.states[x.0].clone()).collect()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn event(&self, e: EventId) -> &Event {
        &self.events[e.0]
    }

    pub fn event_id(&self, name: &str) -> Result<EventId> {
        self.event_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidEvent(name.to_string()))
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.events[e.0].observable
    }

    pub fn is_controllable(&self, e: EventId) -> bool {
        self.events[e.0].controllable
    }

    pub fn observable_events(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.events.len()).map(EventId).filter(|&e| self.is_observable(e))
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    /// Outgoing transitions of `x`, sorted by event then target.
    pub fn outgoing(&self, x: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.outgoing[x.0].iter().map(|&i| &self.transitions[i])
    }

    pub fn incoming(&self, x: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.incoming[x.0].iter().map(|&i| &self.transitions[i])
    }

    /// Targets of `σ`-labelled transitions out of `x`.
    pub fn successors(&self, x: StateId, event: EventId) -> impl Iterator<Item = StateId> + '_ {
        self.outgoing(x).filter(move |t| t.event == event).map(|t| t.target)
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn is_secret(&self, x: StateId) -> bool {
        self.secret[x.0]
    }

    pub fn secret_states(&self) -> StateSet {
        self.states().filter(|&x| self.is_secret(x)).collect()
    }

    pub fn nonsecret_states(&self) -> StateSet {
        self.states().filter(|&x| !self.is_secret(x)).collect()
    }

    pub fn named(&self, t: &Transition) -> NamedTransition {
        NamedTransition::new(
            self.state_name(t.source),
            self.events[t.event.0].name.as_str(),
            self.state_name(t.target),
        )
    }

    pub fn find_transition(&self, t: &NamedTransition) -> Option<Transition> {
        let source = self.state_index.get(&t.from)?;
        let event = self.event_index.get(&t.event)?;
        let target = self.state_index.get(&t.to)?;
        let wanted = Transition {
            source: *source,
            event: *event,
            target: *target,
        };
        self.transitions.binary_search(&wanted).ok().map(|_| wanted)
    }

    pub fn controllable_transitions(&self) -> Vec<NamedTransition> {
        self.transitions
            .iter()
            .filter(|t| self.is_controllable(t.event))
            .map(|t| self.named(t))
            .collect()
    }

    /// Whether `run` starts somewhere in the automaton and follows its transitions.
    pub fn is_run(&self, run: &Run) -> bool {
        if self.state_id(&run.start).is_err() {
            return false;
        }
        run.transitions().iter().all(|t| self.find_transition(t).is_some())
    }

    /// Least superset of `from` closed under unobservable transitions.
    pub fn unobservable_reach(&self, from: &StateSet) -> Result<StateSet> {
        if let Some(x) = from.iter().find(|x| x.0 >= self.states.len()) {
            return Err(Error::InvalidState(format!("#{}", x.0)));
        }
        let mut reach = from.clone();
        let mut stack: Vec<StateId> = from.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for t in self.outgoing(x) {
                if !self.is_observable(t.event) && reach.insert(t.target) {
                    stack.push(t.target);
                }
            }
        }
        Ok(reach)
    }

    /// Copy of this automaton restricted to `keep`, with the given initial set
    /// and only the transitions accepted by `keep_transition`. The alphabet is
    /// preserved unchanged.
    pub(crate) fn restrict(
        &self,
        keep: &[bool],
        initial: &StateSet,
        keep_transition: impl Fn(&Transition) -> bool,
    ) -> Nfa {
        let mut remap = vec![None; self.states.len()];
        let mut states = Vec::new();
        let mut secret = Vec::new();
        for x in self.states() {
            if keep[x.0] {
                remap[x.0] = Some(StateId(states.len()));
                states.push(self.states[x.0].clone());
                secret.push(self.secret[x.0]);
            }
        }
        let state_index = states
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), StateId(i)))
            .collect();
        let transitions = self
            .transitions
            .iter()
            .filter(|t| keep_transition(t))
            .filter_map(|t| {
                Some(Transition {
                    source: remap[t.source.0]?,
                    event: t.event,
                    target: remap[t.target.0]?,
                })
            })
            .collect();
        let initial = initial.iter().filter_map(|x| remap[x.0]).collect();
        Nfa::assemble(
            states,
            state_index,
            self.events.clone(),
            self.event_index.clone(),
            transitions,
            initial,
            secret,
        )
    }

    /// States reachable from `from` using transitions accepted by `allow`.
    pub(crate) fn reachable_from(&self, from: &StateSet, allow: impl Fn(&Transition) -> bool) -> Vec<bool> {
        let mut seen = vec![false; self.states.len()];
        let mut queue = VecDeque::new();
        for &x in from {
            if !seen[x.0] {
                seen[x.0] = true;
                queue.push_back(x);
            }
        }
        while let Some(x) = queue.pop_front() {
            for t in self.outgoing(x) {
                if allow(t) && !seen[t.target.0] {
                    seen[t.target.0] = true;
                    queue.push_back(t.target);
                }
            }
        }
        seen
    }
}

/// Deletes unobservable events from `word`, keeping order.
pub fn natural_projection<S: AsRef<str>>(word: &[S], alphabet: &[Event]) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(word.len());
    for e in word {
        let e = e.as_ref();
        let event = alphabet
            .iter()
            .find(|ev| ev.name == e)
            .ok_or_else(|| Error::InvalidEvent(e.to_string()))?;
        if event.observable {
            out.push(e.to_string());
        }
    }
    Ok(out)
}

/// The sub-automaton induced by the states reachable from the initial states.
pub fn accessible_part(nfa: &Nfa) -> Nfa {
    let keep = nfa.reachable_from(nfa.initial(), |_| true);
    nfa.restrict(&keep, nfa.initial(), |_| true)
}

/// Removes `cut` and returns the accessible part of what remains.
pub fn disable_transitions<'a>(nfa: &Nfa, cut: impl IntoIterator<Item = &'a NamedTransition>) -> Result<Nfa> {
    let mut removed = BTreeSet::new();
    for t in cut {
        let found = nfa
            .find_transition(t)
            .ok_or_else(|| Error::UnknownTransition(t.to_string()))?;
        if !nfa.is_controllable(found.event) {
            return Err(Error::UncontrollableCut(t.to_string()));
        }
        removed.insert(found);
    }
    let keep = nfa.reachable_from(nfa.initial(), |t| !removed.contains(t));
    Ok(nfa.restrict(&keep, nfa.initial(), |t| !removed.contains(t)))
}
