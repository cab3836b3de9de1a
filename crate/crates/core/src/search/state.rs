use std::collections::BTreeSet;

use crate::kb::KnowledgeBase;
use crate::logic::{resolve_step, Alternative, ResolveError, Substitution, VarGen};
use crate::term::Atom;
use crate::valuation::Value;

#[derive(Clone, Debug, PartialEq)]
pub struct Goal {
    pub atom: Atom,
    pub depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Runnable,
    Suspended,
    Dead,
}

#[derive(Clone, Debug)]
struct ChoicePoint {
    goals: Vec<Goal>,
    subst: Substitution,
    depth: u32,
    // Reversed: `pop` yields the next alternative in KB order.
    alternatives: Vec<Alternative>,
}

/// Continuation parked while the session decides on an assumption or waits
/// for an answer.
#[derive(Clone, Debug)]
pub(crate) struct Pending {
    pub(crate) atom: Atom,
    goals: Vec<Goal>,
    subst: Substitution,
}

/// What a single machine step ran into.
#[derive(Debug)]
pub(crate) enum Machine {
    Continue,
    /// A goal at the depth bound was not expanded.
    Cut,
    Completed,
    Exhausted,
    Assume,
    Ask(Atom),
    Error(ResolveError),
}

/// One line of reasoning: the observations it works under are held by the
/// session; the state carries its assumptions `D`, value `N`, and a
/// depth-first SLD machine whose clause choice points backtrack locally.
#[derive(Clone, Debug)]
pub struct ProofState {
    pub(crate) seq: u64,
    pub(crate) parent: Option<u64>,
    pub(crate) assumed: BTreeSet<Atom>,
    pub(crate) value: Value,
    pub(crate) status: Status,
    goals: Vec<Goal>,
    subst: Substitution,
    choices: Vec<ChoicePoint>,
    vars: VarGen,
    backtrack: bool,
    pub(crate) pending: Option<Pending>,
}

impl ProofState {
    pub(crate) fn root(seq: u64, goal: &[Atom], value: Value) -> Self {
        ProofState {
            seq,
            parent: None,
            assumed: BTreeSet::new(),
            value,
            status: Status::Suspended,
            goals: goal.iter().rev().map(|a| Goal { atom: a.clone(), depth: 0 }).collect(),
            subst: Substitution::new(),
            choices: Vec::new(),
            vars: VarGen::default(),
            backtrack: false,
            pending: None,
        }
    }

    #[cfg(test)]
    pub(crate) fn detached(seq: u64, assumed: BTreeSet<Atom>, value: Value) -> Self {
        let mut st = ProofState::root(seq, &[], value);
        st.assumed = assumed;
        st
    }

    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn parent(&self) -> Option<u64> {
        self.parent
    }

    pub fn assumed(&self) -> &BTreeSet<Atom> {
        &self.assumed
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn subst(&self) -> &Substitution {
        &self.subst
    }

    /// Remaining goals, leftmost first.
    pub fn goals(&self) -> impl Iterator<Item = &Goal> {
        self.goals.iter().rev()
    }

    /// The state that takes the parked assumption: it owns only the subtree
    /// below the assumption, so it has no choice points of its own.
    pub(crate) fn spawn_taken(&self, seq: u64, pending: Pending, value: Value) -> ProofState {
        let mut assumed = self.assumed.clone();
        assumed.insert(pending.atom);
        ProofState {
            seq,
            parent: Some(self.seq),
            assumed,
            value,
            status: Status::Suspended,
            goals: pending.goals,
            subst: pending.subst,
            choices: Vec::new(),
            vars: self.vars.clone(),
            backtrack: false,
            pending: None,
        }
    }

    /// Accepts a parked question: the asked goal counts as proved.
    pub(crate) fn accept_pending(&mut self) {
        if let Some(p) = self.pending.take() {
            self.goals = p.goals;
            self.subst = p.subst;
            self.backtrack = false;
        }
    }

    /// Drops the parked alternative; the next step backtracks.
    pub(crate) fn reject_pending(&mut self) {
        self.pending = None;
        self.backtrack = true;
    }

    pub(crate) fn step(&mut self, kb: &KnowledgeBase, bound: u32) -> Machine {
        if self.backtrack {
            self.backtrack = false;
            return self.retry();
        }
        let Some(goal) = self.goals.pop() else {
            self.backtrack = true;
            return Machine::Completed;
        };
        if goal.depth >= bound {
            self.backtrack = true;
            return Machine::Cut;
        }
        match resolve_step(&goal.atom, kb, &self.subst, &mut self.vars) {
            Err(e) => Machine::Error(e),
            Ok(mut alternatives) => {
                alternatives.reverse();
                self.choices.push(ChoicePoint {
                    goals: std::mem::take(&mut self.goals),
                    subst: self.subst.clone(),
                    depth: goal.depth,
                    alternatives,
                });
                self.retry()
            }
        }
    }

    fn retry(&mut self) -> Machine {
        loop {
            let Some(cp) = self.choices.last_mut() else {
                return Machine::Exhausted;
            };
            let Some(alt) = cp.alternatives.pop() else {
                self.choices.pop();
                continue;
            };
            match alt {
                Alternative::Clause { subst, body, .. } => {
                    self.goals = cp.goals.clone();
                    let depth = cp.depth + 1;
                    self.goals.extend(body.into_iter().rev().map(|atom| Goal { atom, depth }));
                    self.subst = subst;
                    return Machine::Continue;
                }
                Alternative::Assume { atom, subst, .. } => {
                    if self.assumed.contains(&atom) {
                        self.goals = cp.goals.clone();
                        self.subst = subst;
                        return Machine::Continue;
                    }
                    self.pending = Some(Pending { atom: atom.clone(), goals: cp.goals.clone(), subst });
                    self.backtrack = true;
                    return Machine::Assume;
                }
                Alternative::Ask { atom } => {
                    self.pending = Some(Pending { atom: atom.clone(), goals: cp.goals.clone(), subst: cp.subst.clone() });
                    self.backtrack = true;
                    return Machine::Ask(atom);
                }
            }
        }
    }
}
