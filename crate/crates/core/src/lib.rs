//! Abductive explanation over definite clauses with hypothesis priors.
//!
//! A knowledge base holds facts and rules, integrity constraints, hypothesis
//! schemas with priors, and askable predicates. Given a goal, the search
//! finds sets of hypothesis instances that together with the facts prove the
//! goal and violate no constraint, best first under a pluggable valuation.

pub mod batch;
pub mod cli;
pub mod kb;
pub mod logic;
pub mod oracle;
pub mod protocol;
pub mod search;
pub mod term;
pub mod testkit;
pub mod valuation;

pub use kb::{parse_atom, parse_atoms, parse_kb, KnowledgeBase};
pub use search::{Explanation, Limits, Session};
pub use term::{Atom, Term};
pub use valuation::{Valuator, ValuatorKind, Value};
