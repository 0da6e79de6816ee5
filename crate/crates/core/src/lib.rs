//! Verification and enforcement of strong state-based opacity for partially
//! observed nondeterministic finite automata.

pub mod automaton;
pub mod composition;
pub mod enforcement;
pub mod error;
pub mod export;
pub mod model;
pub mod observer;
pub mod oracle;
pub mod subautomata;
pub mod verification;

pub use automaton::{
    accessible_part, disable_transitions, natural_projection, Event, EventId, NamedTransition, Nfa, NfaBuilder, Run,
    StateId, StateSet, Transition,
};
pub use enforcement::{enforce, EnforcementOutcome};
pub use error::{Error, Result};
pub use verification::{effective_k_bound, verify, Notion, Verdict};
