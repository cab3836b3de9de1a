use std::collections::BTreeSet;

use super::resolve::VarGen;
use super::subst::{unify_atoms, Substitution};
use crate::kb::KnowledgeBase;
use crate::term::Atom;

#[derive(Clone, Debug, PartialEq)]
pub enum ProofOutcome {
    /// The first proof found, with its answer substitution and the assumed
    /// atoms it used.
    Proved { subst: Substitution, used: BTreeSet<Atom> },
    ExhaustedWithinBound,
    DepthBoundHit,
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refutation {
    /// The body of constraint `constraint` is provable.
    Inconsistent { constraint: usize },
    NoRefutationWithinBound,
}

impl Refutation {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, Refutation::Inconsistent { .. })
    }
}

struct Prover<'a> {
    kb: &'a KnowledgeBase,
    assumed: &'a BTreeSet<Atom>,
    bound: u32,
    cut: bool,
    vars: VarGen,
}

impl Prover<'_> {
    // `goals` is a stack: the leftmost pending goal is last.
    fn solve(
        &mut self,
        goals: &mut Vec<(Atom, u32)>,
        s: &Substitution,
        used: &mut Vec<Atom>,
    ) -> Option<Substitution> {
        let Some((goal, depth)) = goals.pop() else {
            return Some(s.clone());
        };
        let found = self.expand(&goal, depth, goals, s, used);
        goals.push((goal, depth));
        found
    }

    fn expand(
        &mut self,
        goal: &Atom,
        depth: u32,
        goals: &mut Vec<(Atom, u32)>,
        s: &Substitution,
        used: &mut Vec<Atom>,
    ) -> Option<Substitution> {
        if depth >= self.bound {
            self.cut = true;
            return None;
        }
        for clause in &self.kb.facts {
            if clause.head.pred != goal.pred || clause.head.arity() != goal.arity() {
                continue;
            }
            let id = self.vars.fresh();
            let Some(s2) = unify_atoms(goal, &clause.head.rename(id), s) else {
                continue;
            };
            let mark = goals.len();
            goals.extend(clause.body.iter().rev().map(|b| (b.rename(id), depth + 1)));
            let found = self.solve(goals, &s2, used);
            goals.truncate(mark);
            if found.is_some() {
                return found;
            }
        }
        for a in self.assumed {
            let Some(s2) = unify_atoms(goal, a, s) else {
                continue;
            };
            used.push(a.clone());
            let found = self.solve(goals, &s2, used);
            if found.is_some() {
                return found;
            }
            used.pop();
        }
        None
    }
}

/// Depth-first SLD resolution with leftmost goal selection and clauses
/// tried in textual order. `assumed` atoms act as extra facts, tried after
/// the clauses. A goal at depth `d` may only be resolved when `d < bound`;
/// subgoals introduced by resolving it sit at depth `d + 1`.
pub fn prove(goals: &[Atom], kb: &KnowledgeBase, assumed: &BTreeSet<Atom>, bound: u32) -> ProofOutcome {
    let mut p = Prover { kb, assumed, bound, cut: false, vars: VarGen::default() };
    let mut stack: Vec<(Atom, u32)> = goals.iter().rev().map(|g| (g.clone(), 0)).collect();
    let mut used = Vec::new();
    match p.solve(&mut stack, &Substitution::new(), &mut used) {
        Some(subst) => ProofOutcome::Proved { subst, used: used.into_iter().collect() },
        None if p.cut => ProofOutcome::DepthBoundHit,
        None => ProofOutcome::ExhaustedWithinBound,
    }
}

/// Tries to derive the body of some integrity constraint from the facts plus
/// `assumed`. Failing to find one within `bound` is not a proof of
/// consistency; callers treat it as consistent.
pub fn refutes(kb: &KnowledgeBase, assumed: &BTreeSet<Atom>, bound: u32) -> Refutation {
    for (i, c) in kb.constraints.iter().enumerate() {
        if prove(&c.body, kb, assumed, bound).is_proved() {
            return Refutation::Inconsistent { constraint: i };
        }
    }
    Refutation::NoRefutationWithinBound
}
