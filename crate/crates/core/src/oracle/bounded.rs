use std::collections::HashSet;

use crate::automaton::{EventId, Nfa, Run, StateId};
use crate::error::{Error, Result};
use crate::verification::Notion;

#[derive(Clone, Debug)]
struct RawRun {
    states: Vec<StateId>,
    events: Vec<EventId>,
}

/// Every run of an automaton from its initial states with at most `cap`
/// transitions, with literal run-level evaluators of the opacity definitions.
///
/// Observation words are only fully represented up to [`BoundedRunSet::horizon`],
/// so each evaluator only considers runs observing at most that many events.
#[derive(Clone, Debug)]
pub struct BoundedRunSet {
    nfa: Nfa,
    cap: usize,
    runs: Vec<RawRun>,
}

impl BoundedRunSet {
    pub fn enumerate(nfa: &Nfa, cap: usize) -> Self {
        let mut runs = Vec::new();
        let mut stack: Vec<RawRun> = nfa
            .initial()
            .iter()
            .map(|&x| RawRun {
                states: vec![x],
                events: Vec::new(),
            })
            .collect();
        while let Some(run) = stack.pop() {
            if run.events.len() < cap {
                let last = *run.states.last().expect("runs are nonempty");
                for t in nfa.outgoing(last) {
                    let mut next = run.clone();
                    next.states.push(t.target);
                    next.events.push(t.event);
                    stack.push(next);
                }
            }
            runs.push(run);
        }
        BoundedRunSet {
            nfa: nfa.clone(),
            cap,
            runs,
        }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.runs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.runs.is_empty()
    }

    pub fn runs(&self) -> Vec<Run> {
        self.runs
            .iter()
            .map(|r| {
                let mut run = Run::new(self.nfa.state_name(r.states[0]));
                for (e, x) in r.events.iter().zip(&r.states[1..]) {
                    run.push(self.nfa.event(*e).name.as_str(), self.nfa.state_name(*x));
                }
                run
            })
            .collect()
    }

    /// Length of the longest path of unobservable transitions, or an error
    /// if unobservable transitions form a cycle.
    fn longest_unobservable_path(&self) -> Result<usize> {
        let nfa = &self.nfa;
        let n = nfa.num_states();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; n];
        let mut longest = vec![0usize; n];
        fn visit(nfa: &Nfa, x: StateId, mark: &mut [u8], longest: &mut [usize]) -> bool {
            mark[x.0] = 1;
            let mut best = 0;
            for t in nfa.outgoing(x) {
                if nfa.is_observable(t.event) {
                    continue;
                }
                match mark[t.target.0] {
                    1 => return false,
                    0 => {
                        if !visit(nfa, t.target, mark, longest) {
                            return false;
                        }
                    }
                    _ => {}
                }
                best = best.max(longest[t.target.0] + 1);
            }
            longest[x.0] = best;
            mark[x.0] = 2;
            true
        }
        for x in nfa.states() {
            if mark[x.0] == 0 && !visit(nfa, x, &mut mark, &mut longest) {
                return Err(Error::OracleUnsound { cap: self.cap });
            }
        }
        Ok(longest.into_iter().max().unwrap_or(0))
    }

    /// Largest `n` such that every run observing `n` events has at most
    /// `cap` transitions: `n + (n + 1)·u ≤ cap` for the longest unobservable
    /// path length `u`.
    pub fn horizon(&self) -> Result<usize> {
        let u = self.longest_unobservable_path()?;
        if u > self.cap {
            return Err(Error::OracleUnsound { cap: self.cap });
        }
        Ok((self.cap - u) / (u + 1))
    }

    fn project(&self, events: &[EventId]) -> Vec<EventId> {
        events.iter().copied().filter(|&e| self.nfa.is_observable(e)).collect()
    }

    /// Observations of runs that start in a non-secret initial state and
    /// never visit a secret state.
    fn nonsecret_observations(&self) -> HashSet<Vec<EventId>> {
        self.runs
            .iter()
            .filter(|r| r.states.iter().all(|&x| !self.nfa.is_secret(x)))
            .map(|r| self.project(&r.events))
            .collect()
    }

    fn all_matched(&self, leaking: impl Fn(&RawRun) -> bool) -> Result<bool> {
        let horizon = self.horizon()?;
        let matched = self.nonsecret_observations();
        Ok(self
            .runs
            .iter()
            .filter(|r| leaking(r))
            .map(|r| self.project(&r.events))
            .filter(|p| p.len() <= horizon)
            .all(|p| matched.contains(&p)))
    }

    pub fn scso(&self) -> Result<bool> {
        self.all_matched(|r| self.nfa.is_secret(*r.states.last().expect("runs are nonempty")))
    }

    pub fn siso(&self) -> Result<bool> {
        self.all_matched(|r| self.nfa.is_secret(r.states[0]))
    }

    pub fn inf_sso(&self) -> Result<bool> {
        self.all_matched(|r| r.states.iter().any(|&x| self.nfa.is_secret(x)))
    }

    /// Checks every decomposition `x0 -s1-> x1 -s2-> x2` with `x1` secret and
    /// `|P(s2)| ≤ k` against decompositions whose second segment is non-secret.
    pub fn k_sso(&self, k: u64) -> Result<bool> {
        let horizon = self.horizon()?;
        let mut matched: HashSet<(Vec<EventId>, Vec<EventId>)> = HashSet::new();
        for r in &self.runs {
            for j in 0..r.states.len() {
                if r.states[j..].iter().all(|&x| !self.nfa.is_secret(x)) {
                    matched.insert((self.project(&r.events[..j]), self.project(&r.events[j..])));
                }
            }
        }
        for r in &self.runs {
            if self.project(&r.events).len() > horizon {
                continue;
            }
            for i in 0..r.states.len() {
                if !self.nfa.is_secret(r.states[i]) {
                    continue;
                }
                let suffix = self.project(&r.events[i..]);
                if suffix.len() as u64 > k {
                    continue;
                }
                if !matched.contains(&(self.project(&r.events[..i]), suffix)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    pub fn holds(&self, notion: Notion) -> Result<bool> {
        match notion {
            Notion::KSso(k) => self.k_sso(k),
            Notion::Cso => self.k_sso(0),
            Notion::Scso => self.scso(),
            Notion::Siso => self.siso(),
            Notion::InfSso => self.inf_sso(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_counts_every_prefix() {
        let nfa = Nfa::builder()
            .event("a", true, true)
            .transition("0", "a", "0")
            .transition("0", "a", "1")
            .initial("0")
            .build()
            .unwrap();
        // Runs of length 0, 1, 2: 1 + 2 + 2.
        assert_eq!(BoundedRunSet::enumerate(&nfa, 2).len(), 5);
    }

    #[test]
    fn horizon_accounts_for_unobservable_paths() {
        let nfa = Nfa::builder()
            .event("a", true, true)
            .event("u", false, true)
            .transition("0", "u", "1")
            .transition("1", "u", "2")
            .initial("0")
            .build()
            .unwrap();
        assert_eq!(BoundedRunSet::enumerate(&nfa, 8).horizon(), Ok(2));
        let cyclic = Nfa::builder()
            .event("u", false, true)
            .transition("0", "u", "1")
            .transition("1", "u", "0")
            .initial("0")
            .build()
            .unwrap();
        assert!(BoundedRunSet::enumerate(&cyclic, 8).horizon().is_err());
    }
}
