use thiserror::Error;

use super::subst::{unify_atoms, Substitution};
use crate::kb::KnowledgeBase;
use crate::term::Atom;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ResolveError {
    #[error("hypothesis instance {0} is not ground at assumption time")]
    NonGroundHypothesis(Atom),
    #[error("askable goal {0} is not ground")]
    NonGroundAskable(Atom),
}

/// Source of fresh variable generations for renaming clauses apart.
#[derive(Clone, Debug)]
pub struct VarGen {
    next: u32,
}

impl Default for VarGen {
    fn default() -> Self {
        VarGen { next: 1 }
    }
}

impl VarGen {
    pub fn fresh(&mut self) -> u32 {
        let id = self.next;
        self.next += 1;
        id
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Alternative {
    /// Resolve against clause `clause`; `body` is the renamed clause body.
    Clause { clause: usize, subst: Substitution, body: Vec<Atom> },
    /// Assume the ground hypothesis instance `atom` of schema `schema`.
    Assume { schema: usize, atom: Atom, subst: Substitution },
    /// Ask the user whether `atom` holds.
    Ask { atom: Atom },
}

/// All ways of resolving `goal` under `s`: clauses in textual order, then
/// hypothesis schemas in declaration order, then the askable question.
pub fn resolve_step(
    goal: &Atom,
    kb: &KnowledgeBase,
    s: &Substitution,
    vars: &mut VarGen,
) -> Result<Vec<Alternative>, ResolveError> {
    let mut out = Vec::new();
    for (i, clause) in kb.facts.iter().enumerate() {
        if clause.head.pred != goal.pred || clause.head.arity() != goal.arity() {
            continue;
        }
        let id = vars.fresh();
        let head = clause.head.rename(id);
        if let Some(s2) = unify_atoms(goal, &head, s) {
            out.push(Alternative::Clause { clause: i, subst: s2, body: clause.body.iter().map(|b| b.rename(id)).collect() });
        }
    }
    for (i, schema) in kb.hypotheses.iter().enumerate() {
        if schema.pattern.pred != goal.pred || schema.pattern.arity() != goal.arity() {
            continue;
        }
        let pattern = schema.pattern.rename(vars.fresh());
        if let Some(s2) = unify_atoms(goal, &pattern, s) {
            let atom = s2.apply_atom(goal);
            if !atom.is_ground() {
                return Err(ResolveError::NonGroundHypothesis(atom));
            }
            out.push(Alternative::Assume { schema: i, atom, subst: s2 });
        }
    }
    if kb.is_askable(goal) {
        let atom = s.apply_atom(goal);
        if !atom.is_ground() {
            return Err(ResolveError::NonGroundAskable(atom));
        }
        out.push(Alternative::Ask { atom });
    }
    Ok(out)
}
