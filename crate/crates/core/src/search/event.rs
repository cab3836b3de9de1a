use std::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Atom, Term};
use crate::valuation::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

impl Answer {
    pub fn as_str(self) -> &'static str {
        match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KillReason {
    Inconsistent { constraint: usize },
    Exhausted,
    TooManyAssumptions,
    Valuation(String),
    Resolution(String),
}

impl fmt::Display for KillReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KillReason::Inconsistent { constraint } => write!(f, "inconsistent (constraint {constraint})"),
            KillReason::Exhausted => write!(f, "exhausted"),
            KillReason::TooManyAssumptions => write!(f, "too many assumptions"),
            KillReason::Valuation(m) => write!(f, "valuation error: {m}"),
            KillReason::Resolution(m) => write!(f, "resolution error: {m}"),
        }
    }
}

/// One entry of a session's event log.
#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    Created { seq: u64, parent: Option<u64>, assumptions: Vec<Atom>, value: Value },
    Assumed { parent: u64, child: u64, atom: Atom, parent_value: Value, child_value: Value },
    Scheduled { seq: u64, value: Value },
    Revalued { seq: u64, value: Value },
    Killed { seq: u64, reason: KillReason },
    ObservationInjected { atom: Atom },
    Asked { seq: u64, atom: Atom },
    Answered { atom: Atom, answer: Answer },
    Emitted { seq: u64, assumptions: Vec<Atom>, value: Value, bindings: Vec<(String, Term)> },
    Restarted { depth_bound: u32 },
    Exhausted,
}
