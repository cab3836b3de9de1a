//! The knowledge-base language: data model, parser and validation.
//!
//! A knowledge base holds the facts (definite clauses), the integrity
//! constraints, the hypothesis schemas the reasoner may assume instances of,
//! optional probability declarations over hypothesis instances, and the
//! predicates whose instances may be resolved by asking the user.

mod parser;
mod validate;

use std::fmt;

pub use parser::{parse_atom, parse_atoms, parse_kb, ParseError};
pub use validate::{has_errors, validate, Diagnostic, Severity};

use crate::term::{Atom, Symbol};

#[derive(Clone, PartialEq, Debug)]
pub struct Clause {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl Clause {
    pub fn fact(head: Atom) -> Self {
        Clause { head, body: Vec::new() }
    }

    pub fn rule(head: Atom, body: Vec<Atom>) -> Self {
        Clause { head, body }
    }
}

/// `false <- body.`: the conjunction of `body` is contradictory.
#[derive(Clone, PartialEq, Debug)]
pub struct Constraint {
    pub body: Vec<Atom>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct HypothesisSchema {
    pub name: Symbol,
    pub pattern: Atom,
    pub prior: f64,
}

impl HypothesisSchema {
    pub fn new(pattern: Atom, prior: f64) -> Self {
        HypothesisSchema { name: pattern.pred.clone(), pattern, prior }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum ProbDecl {
    /// Per-instance prior replacing the schema prior.
    Prior { atom: Atom, probability: f64 },
    /// `P(target | given)`.
    Conditional { target: Atom, given: Atom, probability: f64 },
}

impl ProbDecl {
    pub fn probability(&self) -> f64 {
        match self {
            ProbDecl::Prior { probability, .. } | ProbDecl::Conditional { probability, .. } => *probability,
        }
    }
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct KnowledgeBase {
    pub facts: Vec<Clause>,
    pub constraints: Vec<Constraint>,
    pub hypotheses: Vec<HypothesisSchema>,
    pub prob_decls: Vec<ProbDecl>,
    pub askables: Vec<(Symbol, usize)>,
}

impl KnowledgeBase {
    pub fn is_askable(&self, atom: &Atom) -> bool {
        self.askables.iter().any(|(p, n)| *p == atom.pred && *n == atom.arity())
    }

    /// Index of the first schema whose pattern `atom` is an instance of.
    pub fn schema_of(&self, atom: &Atom) -> Option<usize> {
        schema_index(&self.hypotheses, atom)
    }

    pub fn add_fact(&mut self, atom: Atom) {
        self.facts.push(Clause::fact(atom));
    }
}

pub(crate) fn schema_index(schemas: &[HypothesisSchema], atom: &Atom) -> Option<usize> {
    schemas.iter().position(|s| atom.instance_of(&s.pattern))
}

fn write_conj(f: &mut fmt::Formatter<'_>, atoms: &[Atom]) -> fmt::Result {
    for (i, a) in atoms.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fact {}", self.head)?;
        if !self.body.is_empty() {
            write!(f, " <- ")?;
            write_conj(f, &self.body)?;
        }
        write!(f, ".")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "false <- ")?;
        write_conj(f, &self.body)?;
        write!(f, ".")
    }
}

impl fmt::Display for HypothesisSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "hypothesis {} : {}.", self.pattern, self.prior)
    }
}

impl fmt::Display for ProbDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbDecl::Prior { atom, probability } => write!(f, "prior {atom} = {probability}."),
            ProbDecl::Conditional { target, given, probability } => {
                write!(f, "prob {target} | {given} = {probability}.")
            }
        }
    }
}

/// Pretty-prints in a canonical statement order that parses back to an
/// identical knowledge base.
impl fmt::Display for KnowledgeBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (p, n) in &self.askables {
            writeln!(f, "askable {p}/{n}.")?;
        }
        for h in &self.hypotheses {
            writeln!(f, "{h}")?;
        }
        for d in &self.prob_decls {
            writeln!(f, "{d}")?;
        }
        for c in &self.facts {
            writeln!(f, "{c}")?;
        }
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
