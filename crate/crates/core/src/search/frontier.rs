use super::state::{ProofState, Status};
use crate::valuation::{Comparison, Valuator, Value};

/// Suspended proof states awaiting a restart.
///
/// Popping returns a state whose value no other member strictly exceeds.
/// Among such states, fewer assumptions win, then the lower sequence number.
/// Incomparable values are treated as equal.
#[derive(Default, Debug)]
pub struct Frontier {
    states: Vec<ProofState>,
}

fn beats(v: &dyn Valuator, a: &ProofState, b: &ProofState) -> bool {
    matches!(v.compare(&a.value, &b.value), Ok(Comparison::Greater))
}

fn tie_key(s: &ProofState) -> (usize, u64) {
    (s.assumed.len(), s.seq)
}

impl Frontier {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn push(&mut self, mut st: ProofState) {
        st.status = Status::Suspended;
        self.states.push(st);
    }

    pub fn iter(&self) -> impl Iterator<Item = &ProofState> {
        self.states.iter()
    }

    pub(crate) fn clear(&mut self) {
        self.states.clear();
    }

    /// Removes and returns every state for which `dead` holds.
    pub(crate) fn drain_where(&mut self, mut dead: impl FnMut(&ProofState) -> bool) -> Vec<ProofState> {
        let (gone, kept) = std::mem::take(&mut self.states).into_iter().partition(|s| dead(s));
        self.states = kept;
        gone
    }

    pub fn pop(&mut self, v: &dyn Valuator) -> Option<ProofState> {
        let refs: Vec<&ProofState> = self.states.iter().collect();
        let i = best_of(&refs, v)?;
        let mut st = self.states.swap_remove(i);
        st.status = Status::Runnable;
        Some(st)
    }

    /// States in scheduling order.
    pub fn sorted(&self, v: &dyn Valuator) -> Vec<&ProofState> {
        let mut rest: Vec<&ProofState> = self.states.iter().collect();
        let mut out = Vec::with_capacity(rest.len());
        while let Some(i) = best_of(&rest, v) {
            out.push(rest.remove(i));
        }
        out
    }
}

fn best_of(states: &[&ProofState], v: &dyn Valuator) -> Option<usize> {
    let n = states.len();
    // A linear scan suffices for totally ordered values; cost vectors need
    // the maximal set first.
    let total = states.iter().all(|s| matches!(s.value, Value::Probability(_) | Value::Unit));
    let candidates: Vec<usize> = if total {
        (0..n).collect()
    } else {
        (0..n).filter(|&i| !(0..n).any(|j| j != i && beats(v, states[j], states[i]))).collect()
    };
    let mut best: Option<usize> = None;
    for i in candidates {
        best = match best {
            None => Some(i),
            Some(b) => {
                let (si, sb) = (states[i], states[b]);
                let better = if total {
                    beats(v, si, sb) || (!beats(v, sb, si) && tie_key(si) < tie_key(sb))
                } else {
                    tie_key(si) < tie_key(sb)
                };
                Some(if better { i } else { b })
            }
        };
    }
    best
}
