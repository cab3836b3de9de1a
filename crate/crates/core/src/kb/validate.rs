use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{KnowledgeBase, ProbDecl};
use crate::term::{Atom, Symbol, Term};
use crate::valuation;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    fn error(message: String) -> Self {
        Diagnostic { severity: Severity::Error, message }
    }

    fn warning(message: String) -> Self {
        Diagnostic { severity: Severity::Warning, message }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.severity {
            Severity::Error => write!(f, "error: {}", self.message),
            Severity::Warning => write!(f, "warning: {}", self.message),
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

fn in_range(p: f64) -> bool {
    p > 0.0 && p <= 1.0
}

fn note_term_arities(t: &Term, functors: &mut BTreeMap<Symbol, BTreeSet<usize>>) {
    if let Term::App(f, args) = t {
        functors.entry(f.clone()).or_default().insert(args.len());
        args.iter().for_each(|a| note_term_arities(a, functors));
    }
}

/// Checks a parsed knowledge base. Errors make the base unusable for search;
/// warnings flag likely authoring mistakes.
pub fn validate(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut names: BTreeMap<Symbol, usize> = BTreeMap::new();
    for h in &kb.hypotheses {
        *names.entry(h.name.clone()).or_default() += 1;
        if !in_range(h.prior) {
            out.push(Diagnostic::error(format!("prior {} of hypothesis {} is outside (0,1]", h.prior, h.pattern)));
        }
        if kb.is_askable(&h.pattern) {
            out.push(Diagnostic::error(format!(
                "hypothesis {} is also declared askable",
                h.pattern
            )));
        }
    }
    for (name, count) in &names {
        if *count > 1 {
            out.push(Diagnostic::error(format!("duplicate hypothesis name `{name}`")));
        }
    }

    let mut seen_priors: BTreeSet<&Atom> = BTreeSet::new();
    let mut seen_conditionals: BTreeSet<(&Atom, &Atom)> = BTreeSet::new();
    for d in &kb.prob_decls {
        if !in_range(d.probability()) {
            out.push(Diagnostic::error(format!("probability in `{d}` is outside (0,1]")));
        }
        let atoms: Vec<&Atom> = match d {
            ProbDecl::Prior { atom, .. } => {
                if !seen_priors.insert(atom) {
                    out.push(Diagnostic::error(format!("duplicate prior override for {atom}")));
                }
                vec![atom]
            }
            ProbDecl::Conditional { target, given, .. } => {
                if !seen_conditionals.insert((target, given)) {
                    out.push(Diagnostic::error(format!("duplicate conditional for {target} given {given}")));
                }
                if target == given {
                    out.push(Diagnostic::error(format!("`{d}` conditions an atom on itself")));
                }
                vec![target, given]
            }
        };
        for a in atoms {
            if !a.is_ground() {
                out.push(Diagnostic::error(format!("`{d}` refers to non-ground atom {a}")));
            } else if kb.schema_of(a).is_none() {
                out.push(Diagnostic::error(format!(
                    "`{d}` refers to {a}, which is not an instance of any declared hypothesis"
                )));
            }
        }
    }

    let heads: BTreeSet<(Symbol, usize)> = kb.facts.iter().map(|c| c.head.key()).collect();
    for (p, n) in &kb.askables {
        if heads.contains(&(p.clone(), *n)) {
            out.push(Diagnostic::error(format!("askable predicate {p}/{n} also appears in a clause head")));
        }
    }

    // Arity consistency for predicates and functors.
    let mut preds: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
    let mut functors: BTreeMap<Symbol, BTreeSet<usize>> = BTreeMap::new();
    let mut note = |a: &Atom| {
        preds.entry(a.pred.clone()).or_default().insert(a.arity());
        a.args.iter().for_each(|t| note_term_arities(t, &mut functors));
    };
    for c in &kb.facts {
        note(&c.head);
        c.body.iter().for_each(&mut note);
    }
    kb.constraints.iter().flat_map(|c| &c.body).for_each(&mut note);
    kb.hypotheses.iter().for_each(|h| note(&h.pattern));
    for (p, arities) in preds.iter().chain(functors.iter()) {
        if arities.len() > 1 {
            let list: Vec<String> = arities.iter().map(|n| n.to_string()).collect();
            out.push(Diagnostic::error(format!("symbol `{p}` is used with arities {}", list.join(" and "))));
        }
    }

    out.extend(valuation::monotonicity_issues(kb).into_iter().map(Diagnostic::error));
    out.extend(valuation::inert_conditionals(kb).into_iter().map(Diagnostic::warning));

    // Warnings.
    let hyp_keys: BTreeSet<(Symbol, usize)> = kb.hypotheses.iter().map(|h| h.pattern.key()).collect();
    let askable: BTreeSet<(Symbol, usize)> = kb.askables.iter().cloned().collect();
    let bodies = kb.facts.iter().flat_map(|c| &c.body).chain(kb.constraints.iter().flat_map(|c| &c.body));
    let mut used: BTreeSet<(Symbol, usize)> = BTreeSet::new();
    for a in bodies {
        used.insert(a.key());
    }
    for (p, n) in &used {
        let k = (p.clone(), *n);
        if !heads.contains(&k) && !hyp_keys.contains(&k) && !askable.contains(&k) {
            out.push(Diagnostic::warning(format!("predicate {p}/{n} is used but never defined")));
        }
    }
    for h in &kb.hypotheses {
        if !used.contains(&h.pattern.key()) {
            out.push(Diagnostic::warning(format!(
                "hypothesis {} is unreachable: no clause or constraint body uses it",
                h.pattern
            )));
        }
    }

    out
}
