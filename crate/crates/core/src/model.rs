//! JSON model documents.
//!
//! ```json
//! {
//!   "version": 1,
//!   "states": [{"id": "0", "initial": true}, {"id": "1", "secret": true}],
//!   "events": [{"name": "a", "observable": true, "controllable": false}],
//!   "transitions": [{"from": "0", "event": "a", "to": "1"}]
//! }
//! ```
//!
//! State flags default to `false`; event flags default to `true`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::automaton::Nfa;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

fn yes() -> bool {
    true
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub version: u64,
    pub states: Vec<StateDecl>,
    #[serde(default)]
    pub events: Vec<EventDecl>,
    #[serde(default)]
    pub transitions: Vec<TransitionDecl>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDecl {
    pub id: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub initial: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub secret: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventDecl {
    pub name: String,
    #[serde(default = "yes")]
    pub observable: bool,
    #[serde(default = "yes")]
    pub controllable: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDecl {
    pub from: String,
    pub event: String,
    pub to: String,
}

impl ModelDocument {
    pub fn from_nfa(nfa: &Nfa) -> Self {
        ModelDocument {
            version: FORMAT_VERSION,
            states: nfa
                .states()
                .map(|x| StateDecl {
                    id: nfa.state_name(x).to_string(),
                    initial: nfa.initial().contains(&x),
                    secret: nfa.is_secret(x),
                })
                .collect(),
            events: nfa
                .events()
                .iter()
                .map(|e| EventDecl {
                    name: e.name.clone(),
                    observable: e.observable,
                    controllable: e.controllable,
                })
                .collect(),
            transitions: nfa
                .transitions()
                .iter()
                .map(|t| {
                    let n = nfa.named(t);
                    TransitionDecl {
                        from: n.from,
                        event: n.event,
                        to: n.to,
                    }
                })
                .collect(),
        }
    }

    /// Checks referential integrity and builds the automaton.
    pub fn to_nfa(&self) -> Result<Nfa> {
        if self.version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.version));
        }
        if self.states.is_empty() {
            return Err(Error::EmptyModel);
        }
        let mut states = HashSet::new();
        let mut builder = Nfa::builder();
        for s in &self.states {
            if !states.insert(s.id.as_str()) {
                return Err(Error::DuplicateState(s.id.clone()));
            }
            builder = builder.state(s.id.as_str());
            if s.initial {
                builder = builder.initial(s.id.as_str());
            }
            if s.secret {
                builder = builder.secret(s.id.as_str());
            }
        }
        let mut events = HashSet::new();
        for e in &self.events {
            if !events.insert(e.name.as_str()) {
                return Err(Error::DuplicateEvent(e.name.clone()));
            }
            builder = builder.event(e.name.as_str(), e.observable, e.controllable);
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let checks = [
                (&t.from, states.contains(t.from.as_str()), "from"),
                (&t.event, events.contains(t.event.as_str()), "event"),
                (&t.to, states.contains(t.to.as_str()), "to"),
            ];
            for (name, ok, field) in checks {
                if !ok {
                    return Err(Error::UnknownReference {
                        name: name.clone(),
                        location: format!("transitions[{i}].{field}"),
                    });
                }
            }
            builder = builder.transition(t.from.as_str(), t.event.as_str(), t.to.as_str());
        }
        builder.build()
    }
}

/// Parses and validates a model document.
pub fn parse_model(text: &[u8]) -> Result<Nfa> {
    let doc: ModelDocument = serde_json::from_slice(text).map_err(|e| Error::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    doc.to_nfa()
}

/// Renders `nfa` as a pretty-printed model document.
pub fn serialize_model(nfa: &Nfa) -> String {
    let mut text =
        serde_json::to_string_pretty(&ModelDocument::from_nfa(nfa)).expect("model documents always serialize");
    text.push('\n');
    text
}
