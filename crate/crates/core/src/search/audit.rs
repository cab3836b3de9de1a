//! Replays an event log and checks the best-first invariants.

use std::collections::BTreeMap;

use super::event::Event;
use crate::valuation::{Comparison, Value};

#[derive(Clone, Debug, Default)]
pub struct Audit {
    pub emissions: usize,
    pub edges: usize,
    pub violations: Vec<String>,
}

impl Audit {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn strictly_better(a: &Value, b: &Value) -> bool {
    matches!(a.compare(b), Ok(Comparison::Greater))
}

/// Checks that
/// - every emitted value is not strictly exceeded by any live state,
/// - every assumption edge does not raise the value,
/// - emissions are non-increasing while no observation was injected and the
///   search was not restarted at a deeper bound.
pub fn audit(events: &[Event]) -> Audit {
    let mut out = Audit::default();
    let mut live: BTreeMap<u64, Value> = BTreeMap::new();
    let mut last_emitted: Option<Value> = None;

    for (i, e) in events.iter().enumerate() {
        match e {
            Event::Created { seq, value, .. } => {
                live.insert(*seq, value.clone());
            }
            Event::Revalued { seq, value } => {
                if let Some(v) = live.get_mut(seq) {
                    *v = value.clone();
                }
            }
            Event::Killed { seq, .. } => {
                live.remove(seq);
            }
            Event::Assumed { parent, child, parent_value, child_value, .. } => {
                out.edges += 1;
                if strictly_better(child_value, parent_value) {
                    out.violations.push(format!(
                        "event {i}: child {child} value {child_value} exceeds parent {parent} value {parent_value}"
                    ));
                }
            }
            Event::ObservationInjected { .. } => last_emitted = None,
            Event::Restarted { .. } => {
                live.clear();
                last_emitted = None;
            }
            Event::Emitted { seq, value, .. } => {
                out.emissions += 1;
                for (other, v) in &live {
                    if other != seq && strictly_better(v, value) {
                        out.violations.push(format!(
                            "event {i}: emitted value {value} from state {seq} is below live state {other} at {v}"
                        ));
                    }
                }
                if let Some(prev) = &last_emitted {
                    if strictly_better(value, prev) {
                        out.violations.push(format!("event {i}: emitted value {value} exceeds earlier emission {prev}"));
                    }
                }
                last_emitted = Some(value.clone());
            }
            Event::Scheduled { .. } | Event::Asked { .. } | Event::Answered { .. } | Event::Exhausted => {}
        }
    }
    out
}
