//! Reference deciders that evaluate the opacity definitions directly.
//!
//! They share nothing with the observer and composition modules. Each notion
//! is decided by a breadth-first search over observation words, where the
//! configuration reached by a word records exactly the run facts the
//! definition quantifies over. `cap` bounds the word length explored; if new
//! configurations still appear at that depth the search fails with
//! [`Error::OracleUnsound`] instead of guessing.

mod bounded;

pub use bounded::BoundedRunSet;

use std::collections::{BTreeSet, HashSet};
use std::hash::Hash;

use crate::automaton::{accessible_part, disable_transitions, NamedTransition, Nfa, StateId, StateSet};
use crate::error::{Error, Result};
use crate::verification::Notion;

/// Largest controllable-transition count [`oracle_enforceable`] will enumerate.
pub const ENUMERATION_LIMIT: usize = 16;

/// Shortest depth at which `bad` holds, exploring words up to length `cap`.
fn shortest_violation<C, S, B>(init: Vec<C>, succ: S, bad: B, cap: usize) -> Result<Option<usize>>
where
    C: Clone + Eq + Hash,
    S: Fn(&C) -> Vec<C>,
    B: Fn(&C) -> bool,
{
    let mut seen: HashSet<C> = HashSet::new();
    let mut layer: Vec<C> = init.into_iter().filter(|c| seen.insert(c.clone())).collect();
    let mut depth = 0;
    loop {
        if layer.iter().any(&bad) {
            return Ok(Some(depth));
        }
        let next: Vec<C> = layer
            .iter()
            .flat_map(&succ)
            .filter(|c| seen.insert(c.clone()))
            .collect();
        if next.is_empty() {
            return Ok(None);
        }
        if depth == cap {
            return Err(Error::OracleUnsound { cap });
        }
        layer = next;
        depth += 1;
    }
}

fn observable_events(nfa: &Nfa) -> Vec<crate::automaton::EventId> {
    nfa.observable_events().collect()
}

/// Closure of `set` under unobservable moves, optionally avoiding secret states.
fn close(nfa: &Nfa, set: &mut StateSet, avoid_secret: bool) {
    let mut stack: Vec<StateId> = set.iter().copied().collect();
    while let Some(x) = stack.pop() {
        for t in nfa.outgoing(x) {
            if nfa.is_observable(t.event) || (avoid_secret && nfa.is_secret(t.target)) {
                continue;
            }
            if set.insert(t.target) {
                stack.push(t.target);
            }
        }
    }
}

fn step(nfa: &Nfa, set: &StateSet, sigma: crate::automaton::EventId, avoid_secret: bool) -> StateSet {
    let mut next: StateSet = set
        .iter()
        .flat_map(|&x| nfa.outgoing(x))
        .filter(|t| t.event == sigma && !(avoid_secret && nfa.is_secret(t.target)))
        .map(|t| t.target)
        .collect();
    close(nfa, &mut next, avoid_secret);
    next
}

/// Every configuration reachable from `init`, failing if the search has not
/// saturated after `cap` layers.
/// Each is paired with the depth at which it was first reached.
fn saturate<C, S>(init: Vec<C>, succ: S, cap: usize) -> Result<Vec<(C, usize)>>
where
    C: Clone + Eq + Hash,
    S: Fn(&C) -> Vec<C>,
{
    let mut seen: HashSet<C> = HashSet::new();
    let mut all: Vec<(C, usize)> = init
        .into_iter()
        .filter(|c| seen.insert(c.clone()))
        .map(|c| (c, 0))
        .collect();
    let mut start = 0;
    let mut depth = 0;
    loop {
        let next: Vec<(C, usize)> = all[start..]
            .iter()
            .flat_map(|(c, _)| succ(c))
            .filter(|c| seen.insert(c.clone()))
            .map(|c| (c, depth + 1))
            .collect();
        if next.is_empty() {
            return Ok(all);
        }
        if depth == cap {
            return Err(Error::OracleUnsound { cap });
        }
        start = all.len();
        all.extend(next);
        depth += 1;
    }
}

/// Every set of states reachable by some observation word.
fn reachable_estimates(nfa: &Nfa, cap: usize) -> Result<Vec<(StateSet, usize)>> {
    let mut init = nfa.initial().clone();
    if init.is_empty() {
        return Ok(Vec::new());
    }
    close(nfa, &mut init, false);
    let events = observable_events(nfa);
    saturate(
        vec![init],
        |r: &StateSet| {
            events
                .iter()
                .map(|&e| step(nfa, r, e, false))
                .filter(|n| !n.is_empty())
                .collect()
        },
        cap,
    )
}

/// For each observation reach set from which a secret visit can leak, the
/// length of the shortest word reaching it and the shortest observable suffix
/// length of a leaking-secret run in the sense of strong K-step opacity.
///
/// For an observation `α` with reach set `R`, a secret visit after `α`
/// followed by observation `β` leaks when some run from a secret state of
/// `R` produces `β` while no non-secret run from a non-secret state of `R`
/// does.
pub fn leak_profile(nfa: &Nfa, cap: usize) -> Result<Vec<(usize, usize)>> {
    let events = observable_events(nfa);
    let mut profile = Vec::new();
    for (r, depth) in reachable_estimates(nfa, cap)? {
        let mut any: StateSet = r.iter().copied().filter(|&x| nfa.is_secret(x)).collect();
        if any.is_empty() {
            continue;
        }
        close(nfa, &mut any, false);
        let mut clean: StateSet = r.iter().copied().filter(|&x| !nfa.is_secret(x)).collect();
        close(nfa, &mut clean, true);
        let leak = shortest_violation(
            vec![(any, clean)],
            |(f, w): &(StateSet, StateSet)| {
                events
                    .iter()
                    .filter_map(|&e| {
                        let f2 = step(nfa, f, e, false);
                        (!f2.is_empty()).then(|| (f2, step(nfa, w, e, true)))
                    })
                    .collect()
            },
            |(_, w)| w.is_empty(),
            cap,
        )?;
        if let Some(d) = leak {
            profile.push((depth, d));
        }
    }
    Ok(profile)
}

/// Shortest observable suffix length of any leaking-secret run, or `None`.
pub fn min_leak_suffix(nfa: &Nfa, cap: usize) -> Result<Option<usize>> {
    Ok(leak_profile(nfa, cap)?.into_iter().map(|(_, d)| d).min())
}

pub fn oracle_k_sso(nfa: &Nfa, k: u64, cap: usize) -> Result<bool> {
    Ok(min_leak_suffix(nfa, cap)?.map_or(true, |d| d as u64 > k))
}

pub fn oracle_cso(nfa: &Nfa, cap: usize) -> Result<bool> {
    oracle_k_sso(nfa, 0, cap)
}

/// A state of some run, tagged with whether the run started in a secret
/// state and whether it has visited one.
type Tagged = (StateId, bool, bool);

fn tagged_close(nfa: &Nfa, set: &mut BTreeSet<Tagged>) {
    let mut stack: Vec<Tagged> = set.iter().copied().collect();
    while let Some((x, origin, visited)) = stack.pop() {
        for t in nfa.outgoing(x) {
            if nfa.is_observable(t.event) {
                continue;
            }
            let next = (t.target, origin, visited || nfa.is_secret(t.target));
            if set.insert(next) {
                stack.push(next);
            }
        }
    }
}

/// Length of the shortest observation after which the tagged runs leak.
fn tagged_violation(nfa: &Nfa, cap: usize, leaks: impl Fn(&BTreeSet<Tagged>) -> bool) -> Result<Option<usize>> {
    let mut init: BTreeSet<Tagged> = nfa
        .initial()
        .iter()
        .map(|&x| (x, nfa.is_secret(x), nfa.is_secret(x)))
        .collect();
    if init.is_empty() {
        return Ok(None);
    }
    tagged_close(nfa, &mut init);
    let events = observable_events(nfa);
    shortest_violation(
        vec![init],
        |c: &BTreeSet<Tagged>| {
            events
                .iter()
                .filter_map(|&e| {
                    let mut next: BTreeSet<Tagged> = c
                        .iter()
                        .flat_map(|&(x, o, v)| {
                            nfa.outgoing(x)
                                .filter(move |t| t.event == e)
                                .map(move |t| (t.target, o, v || nfa.is_secret(t.target)))
                        })
                        .collect();
                    tagged_close(nfa, &mut next);
                    (!next.is_empty()).then_some(next)
                })
                .collect()
        },
        |c| {
            let matched = c.iter().any(|&(_, _, v)| !v);
            !matched && leaks(c)
        },
        cap,
    )
}

/// Length of the shortest observation exposing a violation of one of the
/// non-step-bounded notions, or `None` if it holds.
///
/// SCSO: some run ending in a secret state has no non-secret run from a
/// non-secret initial state with the same observation. SISO: the same for
/// runs from secret initial states. Inf-SSO: the same for runs that have
/// visited a secret state.
pub fn violation_depth(nfa: &Nfa, notion: Notion, cap: usize) -> Result<Option<usize>> {
    match notion {
        Notion::Scso => tagged_violation(nfa, cap, |c| c.iter().any(|&(x, _, _)| nfa.is_secret(x))),
        Notion::Siso => tagged_violation(nfa, cap, |c| c.iter().any(|&(_, o, _)| o)),
        Notion::InfSso => tagged_violation(nfa, cap, |c| c.iter().any(|&(_, _, v)| v)),
        Notion::KSso(k) => Ok(leak_profile(nfa, cap)?
            .into_iter()
            .filter(|&(_, d)| d as u64 <= k)
            .map(|(a, d)| a + d)
            .min()),
        Notion::Cso => violation_depth(nfa, Notion::KSso(0), cap),
    }
}

pub fn oracle_scso(nfa: &Nfa, cap: usize) -> Result<bool> {
    Ok(violation_depth(nfa, Notion::Scso, cap)?.is_none())
}

pub fn oracle_siso(nfa: &Nfa, cap: usize) -> Result<bool> {
    Ok(violation_depth(nfa, Notion::Siso, cap)?.is_none())
}

pub fn oracle_inf_sso(nfa: &Nfa, cap: usize) -> Result<bool> {
    Ok(violation_depth(nfa, Notion::InfSso, cap)?.is_none())
}

pub fn oracle_holds(nfa: &Nfa, notion: Notion, cap: usize) -> Result<bool> {
    match notion {
        Notion::KSso(k) => oracle_k_sso(nfa, k, cap),
        Notion::Cso => oracle_cso(nfa, cap),
        Notion::Scso => oracle_scso(nfa, cap),
        Notion::Siso => oracle_siso(nfa, cap),
        Notion::InfSso => oracle_inf_sso(nfa, cap),
    }
}

/// Exhaustive search for a set of controllable transitions whose removal
/// makes `nfa` satisfy `notion`, by increasing cardinality.
pub fn oracle_enforceable(nfa: &Nfa, notion: Notion, cap: usize) -> Result<Option<BTreeSet<NamedTransition>>> {
    let g = accessible_part(nfa);
    let candidates = g.controllable_transitions();
    if candidates.len() > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            count: candidates.len(),
            limit: ENUMERATION_LIMIT,
        });
    }
    let n = candidates.len();
    for size in 0..=n {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let cut: BTreeSet<NamedTransition> = pick.iter().map(|&i| candidates[i].clone()).collect();
            let sub = disable_transitions(&g, &cut)?;
            if oracle_holds(&sub, notion, cap)? {
                return Ok(Some(cut));
            }
            // Next combination in lexicographic order.
            let Some(i) = (0..size).rev().find(|&i| pick[i] < n - size + i) else {
                break;
            };
            pick[i] += 1;
            for j in i + 1..size {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    Ok(None)
}
