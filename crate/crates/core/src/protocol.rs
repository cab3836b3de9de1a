//! Newline-delimited JSON messages between a session and its client.
//!
//! Engine to client: `ask`, `frontier`, `emitted`, `exhausted`, `error`,
//! `halt`. Client to engine: `observe`, `answer`. A trace file holds the
//! whole event log in the same format, client messages included.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::parse_atom;
use crate::search::{Answer, Event, Explanation, ProofState, Session};
use crate::term::{format_atom_set, Atom};
use crate::valuation::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Message {
    Ask {
        atom: String,
    },
    Observe {
        atom: String,
    },
    Answer {
        atom: String,
        value: Answer,
    },
    Frontier(FrontierEvent),
    Emitted(Emission),
    Exhausted,
    Error {
        message: String,
    },
    Halt {
        reason: String,
        explanations: Vec<Emission>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum FrontierEvent {
    Created {
        seq: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parent: Option<u64>,
        assumptions: Vec<String>,
        value: Value,
    },
    Assumed {
        parent: u64,
        child: u64,
        atom: String,
        parent_value: Value,
        child_value: Value,
    },
    Scheduled {
        seq: u64,
        value: Value,
    },
    Revalued {
        seq: u64,
        value: Value,
    },
    Killed {
        seq: u64,
        reason: String,
    },
    Restarted {
        depth_bound: u32,
    },
    /// Suspended states in scheduling order.
    Snapshot {
        states: Vec<StateSummary>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSummary {
    pub seq: u64,
    pub assumptions: Vec<String>,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Emission {
    pub assumptions: Vec<String>,
    pub value: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub posterior: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, String>,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("`{0}` messages are not accepted from a client")]
    NotACommand(String),
    #[error("bad atom `{text}`: {reason}")]
    BadAtom { text: String, reason: String },
}

/// What a client line asks the engine to do.
#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Answer(Atom, Answer),
    Observe(Atom),
}

fn atom_strings<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Vec<String> {
    atoms.into_iter().map(|a| a.to_string()).collect()
}

fn parse_ground(text: &str) -> Result<Atom, ProtocolError> {
    let atom = parse_atom(text).map_err(|e| ProtocolError::BadAtom { text: text.to_string(), reason: e.to_string() })?;
    if !atom.is_ground() {
        return Err(ProtocolError::BadAtom { text: text.to_string(), reason: "not ground".to_string() });
    }
    Ok(atom)
}

/// Decodes one client line. Blank lines are not commands.
pub fn read_command(line: &str) -> Result<Command, ProtocolError> {
    let msg: Message = serde_json::from_str(line.trim()).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    match msg {
        Message::Answer { atom, value } => Ok(Command::Answer(parse_ground(&atom)?, value)),
        Message::Observe { atom } => Ok(Command::Observe(parse_ground(&atom)?)),
        other => Err(ProtocolError::NotACommand(other.type_name().to_string())),
    }
}

impl Message {
    pub fn type_name(&self) -> &'static str {
        match self {
            Message::Ask { .. } => "ask",
            Message::Observe { .. } => "observe",
            Message::Answer { .. } => "answer",
            Message::Frontier(_) => "frontier",
            Message::Emitted(_) => "emitted",
            Message::Exhausted => "exhausted",
            Message::Error { .. } => "error",
            Message::Halt { .. } => "halt",
        }
    }

    /// Engine-to-client messages; `observe` and `answer` only appear in
    /// traces.
    pub fn is_outbound(&self) -> bool {
        !matches!(self, Message::Observe { .. } | Message::Answer { .. })
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("messages always serialize")
    }

    pub fn from_line(line: &str) -> Result<Message, ProtocolError> {
        serde_json::from_str(line).map_err(|e| ProtocolError::Malformed(e.to_string()))
    }
}

pub fn emission(e: &Explanation, posterior: Option<f64>) -> Emission {
    Emission {
        assumptions: atom_strings(&e.assumptions),
        value: e.value.clone(),
        posterior,
        bindings: e.bindings.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
    }
}

pub fn snapshot(session: &Session) -> Message {
    let states = session
        .frontier()
        .sorted(session.valuator())
        .into_iter()
        .map(|s: &ProofState| StateSummary {
            seq: s.seq(),
            assumptions: atom_strings(s.assumed()),
            value: s.value().clone(),
        })
        .collect();
    Message::Frontier(FrontierEvent::Snapshot { states })
}

/// Turns session events into messages. Posteriors of emissions are
/// renormalized over the emissions seen so far.
pub struct Transcriber {
    values: Vec<f64>,
    all_probabilities: bool,
}

impl Default for Transcriber {
    fn default() -> Self {
        Transcriber::new()
    }
}

impl Transcriber {
    pub fn new() -> Self {
        Transcriber { values: Vec::new(), all_probabilities: true }
    }

    pub fn message(&mut self, e: &Event) -> Message {
        match e {
            Event::Created { seq, parent, assumptions, value } => Message::Frontier(FrontierEvent::Created {
                seq: *seq,
                parent: *parent,
                assumptions: atom_strings(assumptions),
                value: value.clone(),
            }),
            Event::Assumed { parent, child, atom, parent_value, child_value } => {
                Message::Frontier(FrontierEvent::Assumed {
                    parent: *parent,
                    child: *child,
                    atom: atom.to_string(),
                    parent_value: parent_value.clone(),
                    child_value: child_value.clone(),
                })
            }
            Event::Scheduled { seq, value } => {
                Message::Frontier(FrontierEvent::Scheduled { seq: *seq, value: value.clone() })
            }
            Event::Revalued { seq, value } => {
                Message::Frontier(FrontierEvent::Revalued { seq: *seq, value: value.clone() })
            }
            Event::Killed { seq, reason } => {
                Message::Frontier(FrontierEvent::Killed { seq: *seq, reason: reason.to_string() })
            }
            Event::Restarted { depth_bound } => {
                Message::Frontier(FrontierEvent::Restarted { depth_bound: *depth_bound })
            }
            Event::ObservationInjected { atom } => Message::Observe { atom: atom.to_string() },
            Event::Asked { atom, .. } => Message::Ask { atom: atom.to_string() },
            Event::Answered { atom, answer } => Message::Answer { atom: atom.to_string(), value: *answer },
            Event::Emitted { assumptions, value, bindings, .. } => {
                match value.as_probability() {
                    Some(p) => self.values.push(p),
                    None => self.all_probabilities = false,
                }
                let posterior = if self.all_probabilities {
                    let total: f64 = self.values.iter().sum();
                    self.values.last().map(|p| p / total)
                } else {
                    None
                };
                Message::Emitted(Emission {
                    assumptions: atom_strings(assumptions),
                    value: value.clone(),
                    posterior,
                    bindings: bindings.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                })
            }
            Event::Exhausted => Message::Exhausted,
        }
    }
}

/// One-line human rendering of an explanation.
pub fn describe(e: &Explanation, posterior: Option<f64>) -> String {
    let mut s = format!("{} value {}", format_atom_set(&e.assumptions), e.value);
    if let Some(p) = posterior {
        s.push_str(&format!(" posterior {p}"));
    }
    if !e.bindings.is_empty() {
        let b: Vec<String> = e.bindings.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        s.push_str(&format!(" where {}", b.join(", ")));
    }
    s
}
