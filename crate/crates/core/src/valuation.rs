//! Valuators assign a value from a partially ordered set to an explanation.
//!
//! A valuator is *useful* when it is defined for every explanation and never
//! prefers an explanation over one of its subsets. The probability valuator
//! ranks explanations by the prior probability of their assumptions, taking
//! hypotheses as independent unless a pairwise conditional is declared.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::{schema_index, HypothesisSchema, KnowledgeBase, ProbDecl};
use crate::term::Atom;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Probability(f64),
    Unit,
    Cost(Vec<f64>),
}

impl Value {
    pub fn as_probability(&self) -> Option<f64> {
        match self {
            Value::Probability(p) => Some(*p),
            _ => None,
        }
    }

    /// `Greater` means `self` is preferred to `other`.
    pub fn compare(&self, other: &Value) -> Result<Comparison, ValuationError> {
        match (self, other) {
            (Value::Probability(a), Value::Probability(b)) => Ok(match a.partial_cmp(b) {
                Some(std::cmp::Ordering::Greater) => Comparison::Greater,
                Some(std::cmp::Ordering::Less) => Comparison::Less,
                Some(std::cmp::Ordering::Equal) => Comparison::Equal,
                None => Comparison::Incomparable,
            }),
            (Value::Unit, Value::Unit) => Ok(Comparison::Equal),
            (Value::Cost(x), Value::Cost(y)) if x.len() == y.len() => {
                let le = x.iter().zip(y).all(|(a, b)| a <= b);
                let ge = x.iter().zip(y).all(|(a, b)| a >= b);
                Ok(match (le, ge) {
                    (true, true) => Comparison::Equal,
                    (true, false) => Comparison::Greater,
                    (false, true) => Comparison::Less,
                    (false, false) => Comparison::Incomparable,
                })
            }
            _ => Err(ValuationError::TagMismatch),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Probability(p) => write!(f, "{p}"),
            Value::Unit => write!(f, "()"),
            Value::Cost(c) => {
                let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Incomparable,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ValuationError {
    #[error("values of different kinds cannot be compared")]
    TagMismatch,
    #[error("more than one declared conditional applies to {0}")]
    AmbiguousDependence(Atom),
    #[error("{0} is not an instance of any hypothesis schema")]
    NotAHypothesis(Atom),
}

fn prior_of(atom: &Atom, schema: &HypothesisSchema, decls: &[ProbDecl]) -> f64 {
    decls
        .iter()
        .find_map(|d| match d {
            ProbDecl::Prior { atom: a, probability } if a == atom => Some(*probability),
            _ => None,
        })
        .unwrap_or(schema.prior)
}

/// Sorts assumptions by the declaration order of their schema, then by term
/// order. This is the order in which chain-rule factors are taken.
pub fn canonical_order<'a>(
    d: impl IntoIterator<Item = &'a Atom>,
    schemas: &[HypothesisSchema],
) -> Result<Vec<(usize, &'a Atom)>, ValuationError> {
    let mut keyed = d
        .into_iter()
        .map(|a| schema_index(schemas, a).map(|i| (i, a)).ok_or_else(|| ValuationError::NotAHypothesis(a.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    keyed.sort();
    keyed.dedup();
    Ok(keyed)
}

/// Probability of the assumption set `d` by the chain rule over the
/// canonical order. An element uses a declared `P(h | g)` when exactly one
/// such `g` precedes it in `d`; otherwise its instance prior, otherwise its
/// schema prior.
pub fn chain_probability(
    d: &BTreeSet<Atom>,
    decls: &[ProbDecl],
    schemas: &[HypothesisSchema],
) -> Result<f64, ValuationError> {
    let order = canonical_order(d, schemas)?;
    let mut p = 1.0;
    for (i, &(schema, h)) in order.iter().enumerate() {
        let earlier = &order[..i];
        let mut applicable = decls.iter().filter_map(|decl| match decl {
            ProbDecl::Conditional { target, given, probability }
                if target == h && earlier.iter().any(|(_, e)| *e == given) =>
            {
                Some(*probability)
            }
            _ => None,
        });
        let factor = match (applicable.next(), applicable.next()) {
            (Some(q), None) => q,
            (Some(_), Some(_)) => return Err(ValuationError::AmbiguousDependence(h.clone())),
            (None, _) => prior_of(h, &schemas[schema], decls),
        };
        p *= factor;
    }
    Ok(p)
}

/// Conditionals that can make a larger explanation more probable than a
/// smaller one. Adding a condition `c` multiplies the value by the factor of
/// `c` and by `P(b | c) / prior(b)` for each dependent `b` it switches on;
/// the product must not exceed one.
pub fn monotonicity_issues(kb: &KnowledgeBase) -> Vec<String> {
    let schemas = &kb.hypotheses;
    let decls = &kb.prob_decls;
    let effective_prior = |a: &Atom| schema_index(schemas, a).map(|i| prior_of(a, &schemas[i], decls));
    let precedes = |given: &Atom, target: &Atom| match (schema_index(schemas, given), schema_index(schemas, target)) {
        (Some(i), Some(j)) => (i, given) < (j, target),
        _ => false,
    };

    let mut conditions: Vec<&Atom> = Vec::new();
    for d in decls {
        if let ProbDecl::Conditional { given, .. } = d {
            if !conditions.contains(&given) {
                conditions.push(given);
            }
        }
    }

    let mut issues = Vec::new();
    for c in conditions {
        let Some(own) = effective_prior(c) else { continue };
        let max_factor = decls
            .iter()
            .filter_map(|d| match d {
                ProbDecl::Conditional { target, given, probability } if target == c && precedes(given, c) => {
                    Some(*probability)
                }
                _ => None,
            })
            .fold(own, f64::max);
        let mut gain = max_factor;
        for d in decls {
            if let ProbDecl::Conditional { target, given, probability } = d {
                if given == c && precedes(c, target) {
                    if let Some(prior) = effective_prior(target) {
                        gain *= (probability / prior).max(1.0);
                    }
                }
            }
        }
        if gain > 1.0 + 1e-12 {
            issues.push(format!(
                "conditionals given {c} can make an explanation more probable than its subsets (gain {gain})"
            ));
        }
    }
    issues
}

/// Conditionals whose condition orders after the target, so they never apply.
pub fn inert_conditionals(kb: &KnowledgeBase) -> Vec<String> {
    let schemas = &kb.hypotheses;
    kb.prob_decls
        .iter()
        .filter_map(|d| match d {
            ProbDecl::Conditional { target, given, .. } => {
                match (schema_index(schemas, given), schema_index(schemas, target)) {
                    (Some(i), Some(j)) if (i, given) > (j, target) => Some(format!(
                        "`{d}` never applies: {given} comes after {target} in evaluation order"
                    )),
                    _ => None,
                }
            }
            _ => None,
        })
        .collect()
}

/// The function `m(O, D)` with its initial value and update hooks.
pub trait Valuator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Value of the empty explanation.
    fn initial(&self) -> Value;

    fn value_of(&self, observations: &BTreeSet<Atom>, assumed: &BTreeSet<Atom>) -> Result<Value, ValuationError>;

    fn on_assume(
        &self,
        observations: &BTreeSet<Atom>,
        assumed: &BTreeSet<Atom>,
        h: &Atom,
    ) -> Result<Value, ValuationError> {
        let mut d = assumed.clone();
        d.insert(h.clone());
        self.value_of(observations, &d)
    }

    /// Value after the observation set changed. Observation-sensitive
    /// valuators override this.
    fn on_observe(&self, observations: &BTreeSet<Atom>, assumed: &BTreeSet<Atom>) -> Result<Value, ValuationError> {
        self.value_of(observations, assumed)
    }

    fn compare(&self, a: &Value, b: &Value) -> Result<Comparison, ValuationError> {
        a.compare(b)
    }
}

#[derive(Clone, Debug)]
pub struct ProbabilityValuator {
    schemas: Vec<HypothesisSchema>,
    decls: Vec<ProbDecl>,
}

impl ProbabilityValuator {
    pub fn new(kb: &KnowledgeBase) -> Self {
        ProbabilityValuator { schemas: kb.hypotheses.clone(), decls: kb.prob_decls.clone() }
    }
}

impl Valuator for ProbabilityValuator {
    fn name(&self) -> &'static str {
        "prob"
    }

    fn initial(&self) -> Value {
        Value::Probability(1.0)
    }

    fn value_of(&self, _observations: &BTreeSet<Atom>, assumed: &BTreeSet<Atom>) -> Result<Value, ValuationError> {
        chain_probability(assumed, &self.decls, &self.schemas).map(Value::Probability)
    }
}

/// Single-element poset: every explanation is as good as any other.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullValuator;

impl Valuator for NullValuator {
    fn name(&self) -> &'static str {
        "null"
    }

    fn initial(&self) -> Value {
        Value::Unit
    }

    fn value_of(&self, _: &BTreeSet<Atom>, _: &BTreeSet<Atom>) -> Result<Value, ValuationError> {
        Ok(Value::Unit)
    }
}

/// One cost component per hypothesis schema: the summed negative log prior
/// of the assumed instances of that schema. Ordered by componentwise
/// dominance, lower preferred.
#[derive(Clone, Debug)]
pub struct CostValuator {
    schemas: Vec<HypothesisSchema>,
    decls: Vec<ProbDecl>,
}

impl CostValuator {
    pub fn new(kb: &KnowledgeBase) -> Self {
        CostValuator { schemas: kb.hypotheses.clone(), decls: kb.prob_decls.clone() }
    }
}

impl Valuator for CostValuator {
    fn name(&self) -> &'static str {
        "cost"
    }

    fn initial(&self) -> Value {
        Value::Cost(vec![0.0; self.schemas.len()])
    }

    fn value_of(&self, _: &BTreeSet<Atom>, assumed: &BTreeSet<Atom>) -> Result<Value, ValuationError> {
        let mut cost = vec![0.0; self.schemas.len()];
        for (i, h) in canonical_order(assumed, &self.schemas)? {
            cost[i] += -prior_of(h, &self.schemas[i], &self.decls).ln();
        }
        Ok(Value::Cost(cost))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ValuatorKind {
    #[default]
    Prob,
    Null,
    Cost,
}

impl ValuatorKind {
    pub fn build(self, kb: &KnowledgeBase) -> Box<dyn Valuator> {
        match self {
            ValuatorKind::Prob => Box::new(ProbabilityValuator::new(kb)),
            ValuatorKind::Null => Box::new(NullValuator),
            ValuatorKind::Cost => Box::new(CostValuator::new(kb)),
        }
    }
}

impl FromStr for ValuatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "prob" => Ok(ValuatorKind::Prob),
            "null" => Ok(ValuatorKind::Null),
            "cost" => Ok(ValuatorKind::Cost),
            other => Err(format!("unknown valuator `{other}` (expected prob, null or cost)")),
        }
    }
}
