//! Best-first search for explanations.
//!
//! A [`Session`] keeps a frontier of proof states, each carrying the
//! observations it works under, its assumptions `D` and the value
//! `N = m(O, D)`. The scheduler always restarts a state whose `N` no other
//! state strictly exceeds. A running state resolves depth-first, backtracking
//! over clause choices on its own. When it needs a hypothesis it forks: the
//! child takes the assumption, is checked for consistency and suspended; the
//! parent gives up that alternative and carries on. Because assumptions only
//! lower `N`, the first completed proof is a preferred explanation.

mod audit;
mod event;
mod frontier;
mod state;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

pub use audit::{audit, Audit};
pub use event::{Answer, Event, KillReason};
pub use frontier::Frontier;
pub use state::{Goal, ProofState, Status};

use crate::kb::{has_errors, validate, Constraint, Diagnostic, KnowledgeBase};
use crate::logic::{prove, refutes, Refutation};
use crate::term::{Atom, Term, Var};
use crate::valuation::{Valuator, Value};
use state::Machine;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SearchError {
    #[error("knowledge base has errors: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidKb(Vec<Diagnostic>),
    #[error("step budget of {0} exhausted")]
    StepBudgetExceeded(u64),
    #[error("an answer about {0} is pending")]
    AnswerPending(Atom),
    #[error("no question about {0} is pending")]
    NotAwaiting(Atom),
    #[error("observation {0} is not ground")]
    NonGroundObservation(Atom),
    #[error("state has no pending assumption")]
    NoPendingAssumption,
    #[error("cannot renormalize an empty list of explanations")]
    EmptyList,
    #[error("only probability values can be renormalized")]
    NotProbability,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Limits {
    /// First depth bound of the iterative-deepening schedule.
    pub initial_depth: u32,
    /// Bounds double from `initial_depth` until they reach this value.
    pub max_depth: u32,
    pub max_assumptions: usize,
    pub step_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { initial_depth: 16, max_depth: 64, max_assumptions: 64, step_budget: 5_000_000 }
    }
}

impl Limits {
    pub fn depth_schedule(&self) -> Vec<u32> {
        let mut d = self.initial_depth.min(self.max_depth);
        let mut out = vec![d];
        while d < self.max_depth {
            d = d.saturating_mul(2).max(1).min(self.max_depth);
            out.push(d);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Explanation {
    /// Assumed hypothesis instances, in term order.
    pub assumptions: Vec<Atom>,
    pub value: Value,
    /// Answer bindings for the goal's variables.
    pub bindings: Vec<(String, Term)>,
}

impl Explanation {
    pub fn assumption_set(&self) -> BTreeSet<Atom> {
        self.assumptions.iter().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepOutcome {
    Continue,
    Emitted(Explanation),
    Ask(Atom),
    Exhausted,
}

/// Result of forking on an assumption.
#[derive(Debug)]
pub struct Fork {
    /// The child that took the assumption, or why it was killed.
    pub taken: Result<ProofState, KillReason>,
    /// The original state, with the assumption alternative dropped.
    pub refused: ProofState,
}

/// Assumptions and bindings of an emitted explanation.
type EmissionKey = (Vec<Atom>, Vec<(String, Term)>);

pub struct Session {
    kb: KnowledgeBase,
    goal: Vec<Atom>,
    goal_vars: Vec<Var>,
    valuator: Box<dyn Valuator>,
    limits: Limits,
    schedule: Vec<u32>,
    level: usize,
    observations: BTreeSet<Atom>,
    frontier: Frontier,
    next_seq: u64,
    steps: u64,
    bound_hit: bool,
    sweep_pending: bool,
    emitted: Vec<Explanation>,
    emitted_keys: HashSet<EmissionKey>,
    answers: BTreeMap<Atom, Answer>,
    awaiting: Option<ProofState>,
    events: Vec<Event>,
    finished: bool,
}

impl Session {
    /// Creates a session whose frontier holds the single state
    /// `<g, {}, initial>`.
    pub fn start(
        goal: Vec<Atom>,
        kb: KnowledgeBase,
        valuator: Box<dyn Valuator>,
        limits: Limits,
    ) -> Result<Session, SearchError> {
        Self::start_with_observations(goal, kb, valuator, limits, &[])
    }

    /// Like [`Session::start`], with `extra` already known as observed facts.
    pub fn start_with_observations(
        goal: Vec<Atom>,
        mut kb: KnowledgeBase,
        valuator: Box<dyn Valuator>,
        limits: Limits,
        extra: &[Atom],
    ) -> Result<Session, SearchError> {
        let diags = validate(&kb);
        if has_errors(&diags) {
            return Err(SearchError::InvalidKb(diags.into_iter().filter(|d| d.severity == crate::kb::Severity::Error).collect()));
        }
        if let Some(o) = extra.iter().find(|o| !o.is_ground()) {
            return Err(SearchError::NonGroundObservation(o.clone()));
        }
        let mut observations: BTreeSet<Atom> = goal.iter().cloned().collect();
        for o in extra {
            kb.add_fact(o.clone());
            observations.insert(o.clone());
        }
        let mut goal_vars = Vec::new();
        for a in &goal {
            for v in a.vars() {
                if !goal_vars.contains(&v) {
                    goal_vars.push(v);
                }
            }
        }
        let schedule = limits.depth_schedule();
        let mut session = Session {
            kb,
            goal,
            goal_vars,
            valuator,
            limits,
            schedule,
            level: 0,
            observations,
            frontier: Frontier::default(),
            next_seq: 0,
            steps: 0,
            bound_hit: false,
            sweep_pending: false,
            emitted: Vec::new(),
            emitted_keys: HashSet::new(),
            answers: BTreeMap::new(),
            awaiting: None,
            events: Vec::new(),
            finished: false,
        };
        let initial = session.valuator.initial();
        session.spawn_root(initial);
        Ok(session)
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn goal(&self) -> &[Atom] {
        &self.goal
    }

    pub fn valuator(&self) -> &dyn Valuator {
        &*self.valuator
    }

    pub fn observations(&self) -> &BTreeSet<Atom> {
        &self.observations
    }

    pub fn frontier(&self) -> &Frontier {
        &self.frontier
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn emitted(&self) -> &[Explanation] {
        &self.emitted
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn depth_bound(&self) -> u32 {
        self.schedule[self.level]
    }

    pub fn is_finished(&self) -> bool {
        self.finished
    }

    /// The question the session is blocked on, if any.
    pub fn awaiting(&self) -> Option<&Atom> {
        self.awaiting.as_ref().and_then(|s| s.pending.as_ref()).map(|p| &p.atom)
    }

    fn log(&mut self, e: Event) {
        self.events.push(e);
    }

    fn fresh_seq(&mut self) -> u64 {
        let s = self.next_seq;
        self.next_seq += 1;
        s
    }

    fn spawn_root(&mut self, value: Value) {
        let seq = self.fresh_seq();
        let root = ProofState::root(seq, &self.goal, value.clone());
        self.log(Event::Created { seq, parent: None, assumptions: Vec::new(), value });
        self.frontier.push(root);
    }

    fn kill(&mut self, seq: u64, reason: KillReason) {
        self.log(Event::Killed { seq, reason });
    }

    /// Kills every suspended state whose assumptions are now refutable.
    fn sweep(&mut self) {
        self.sweep_pending = false;
        let bound = self.depth_bound();
        let states = self.frontier.drain_where(|_| true);
        for st in states {
            match refutes(&self.kb, &st.assumed, bound) {
                Refutation::Inconsistent { constraint } => self.kill(st.seq, KillReason::Inconsistent { constraint }),
                Refutation::NoRefutationWithinBound => self.frontier.push(st),
            }
        }
    }

    /// Pops a state with a highest value, after killing states made
    /// inconsistent by new information. `None` when the frontier is empty.
    pub fn schedule(&mut self) -> Option<ProofState> {
        if self.sweep_pending {
            self.sweep();
        }
        let st = self.frontier.pop(&*self.valuator)?;
        self.log(Event::Scheduled { seq: st.seq, value: st.value.clone() });
        Some(st)
    }

    /// Runs one scheduler step: restarts the best state and runs it until it
    /// suspends, completes a proof, asks a question, or dies.
    pub fn step(&mut self) -> Result<StepOutcome, SearchError> {
        if let Some(a) = self.awaiting() {
            return Err(SearchError::AnswerPending(a.clone()));
        }
        if self.finished {
            return Ok(StepOutcome::Exhausted);
        }
        let Some(st) = self.schedule() else {
            if self.bound_hit && self.level + 1 < self.schedule.len() {
                self.deepen();
                return Ok(StepOutcome::Continue);
            }
            self.finished = true;
            self.log(Event::Exhausted);
            return Ok(StepOutcome::Exhausted);
        };
        self.run_state(st)
    }

    fn deepen(&mut self) {
        self.level += 1;
        self.bound_hit = false;
        self.frontier.clear();
        self.log(Event::Restarted { depth_bound: self.depth_bound() });
        let value = self.root_value();
        self.spawn_root(value);
    }

    fn root_value(&self) -> Value {
        self.valuator.on_observe(&self.observations, &BTreeSet::new()).unwrap_or_else(|_| self.valuator.initial())
    }

    fn run_state(&mut self, mut st: ProofState) -> Result<StepOutcome, SearchError> {
        loop {
            if self.steps >= self.limits.step_budget {
                self.finished = true;
                return Err(SearchError::StepBudgetExceeded(self.limits.step_budget));
            }
            self.steps += 1;
            let bound = self.depth_bound();
            match st.step(&self.kb, bound) {
                Machine::Continue => {}
                Machine::Cut => self.bound_hit = true,
                Machine::Completed => {
                    if let Refutation::Inconsistent { constraint } = refutes(&self.kb, &st.assumed, bound) {
                        self.kill(st.seq, KillReason::Inconsistent { constraint });
                        return Ok(StepOutcome::Continue);
                    }
                    let expl = self.explanation_of(&st);
                    if self.emitted_keys.insert((expl.assumptions.clone(), expl.bindings.clone())) {
                        self.log(Event::Emitted {
                            seq: st.seq,
                            assumptions: expl.assumptions.clone(),
                            value: expl.value.clone(),
                            bindings: expl.bindings.clone(),
                        });
                        self.emitted.push(expl.clone());
                        self.frontier.push(st);
                        return Ok(StepOutcome::Emitted(expl));
                    }
                }
                Machine::Exhausted => {
                    self.kill(st.seq, KillReason::Exhausted);
                    return Ok(StepOutcome::Continue);
                }
                Machine::Error(e) => {
                    self.kill(st.seq, KillReason::Resolution(e.to_string()));
                    return Ok(StepOutcome::Continue);
                }
                Machine::Assume => {
                    let fork = self.fork_on_assume(st)?;
                    if let Ok(taken) = fork.taken {
                        self.frontier.push(taken);
                    }
                    self.frontier.push(fork.refused);
                    return Ok(StepOutcome::Continue);
                }
                Machine::Ask(atom) => {
                    if self.answers.contains_key(&atom) {
                        // Answered before: `yes` is now a fact and resolves
                        // through a clause; `no` and `unknown` fail here.
                        st.reject_pending();
                        continue;
                    }
                    self.log(Event::Asked { seq: st.seq, atom: atom.clone() });
                    self.awaiting = Some(st);
                    return Ok(StepOutcome::Ask(atom));
                }
            }
        }
    }

    fn explanation_of(&self, st: &ProofState) -> Explanation {
        Explanation {
            assumptions: st.assumed.iter().cloned().collect(),
            value: st.value.clone(),
            bindings: self
                .goal_vars
                .iter()
                .map(|v| (v.to_string(), st.subst().apply(&Term::Var(v.clone()))))
                .collect(),
        }
    }

    /// Splits a state parked on an assumption. The child takes the
    /// assumption with its new value, unless that makes the assumptions
    /// refutable, too many, or unvaluable, in which case it is killed. The
    /// parent drops the alternative and backtracks.
    pub fn fork_on_assume(&mut self, mut st: ProofState) -> Result<Fork, SearchError> {
        let pending = st.pending.take().ok_or(SearchError::NoPendingAssumption)?;
        let seq = self.fresh_seq();
        let atom = pending.atom.clone();
        let already = st.assumed.contains(&atom);
        let value = if already {
            Ok(st.value.clone())
        } else {
            self.valuator.on_assume(&self.observations, &st.assumed, &atom)
        };
        let taken = match value {
            Err(e) => {
                let reason = KillReason::Valuation(e.to_string());
                self.kill(seq, reason.clone());
                Err(reason)
            }
            Ok(value) => {
                let child = st.spawn_taken(seq, pending, value.clone());
                self.log(Event::Created {
                    seq,
                    parent: Some(st.seq),
                    assumptions: child.assumed.iter().cloned().collect(),
                    value: value.clone(),
                });
                self.log(Event::Assumed {
                    parent: st.seq,
                    child: seq,
                    atom,
                    parent_value: st.value.clone(),
                    child_value: value,
                });
                let verdict = if already {
                    Ok(())
                } else if child.assumed.len() > self.limits.max_assumptions {
                    Err(KillReason::TooManyAssumptions)
                } else {
                    match refutes(&self.kb, &child.assumed, self.depth_bound()) {
                        Refutation::Inconsistent { constraint } => Err(KillReason::Inconsistent { constraint }),
                        Refutation::NoRefutationWithinBound => Ok(()),
                    }
                };
                match verdict {
                    Ok(()) => Ok(child),
                    Err(reason) => {
                        self.kill(seq, reason.clone());
                        Err(reason)
                    }
                }
            }
        };
        Ok(Fork { taken, refused: st })
    }

    /// Adds `o` to the observations and to the facts, revalues every state
    /// and suspends them all. States whose assumptions became refutable die
    /// at the next scheduling step. A fresh root is started so that lines of
    /// reasoning abandoned before `o` was known get another chance.
    pub fn inject_observation(&mut self, o: Atom) -> Result<(), SearchError> {
        // Rankings start over under the new observation, so an explanation
        // found earlier may be reported again.
        self.emitted_keys.clear();
        self.observe(o)
    }

    fn observe(&mut self, o: Atom) -> Result<(), SearchError> {
        if !o.is_ground() {
            return Err(SearchError::NonGroundObservation(o));
        }
        self.observations.insert(o.clone());
        self.kb.add_fact(o.clone());
        self.log(Event::ObservationInjected { atom: o });

        let states = self.frontier.drain_where(|_| true);
        for mut st in states {
            match self.valuator.on_observe(&self.observations, &st.assumed) {
                Ok(v) => {
                    if v != st.value {
                        self.log(Event::Revalued { seq: st.seq, value: v.clone() });
                        st.value = v;
                    }
                    self.frontier.push(st);
                }
                Err(e) => self.kill(st.seq, KillReason::Valuation(e.to_string())),
            }
        }
        if let Some(st) = self.awaiting.as_mut() {
            if let Ok(v) = self.valuator.on_observe(&self.observations, &st.assumed) {
                st.value = v;
            }
        }
        let value = self.root_value();
        self.spawn_root(value);
        self.sweep_pending = true;
        self.finished = false;
        Ok(())
    }

    /// Resolves the pending question. `yes` makes the atom a fact and an
    /// observation; `no` adds the constraint `false <- atom`; `unknown`
    /// fails the question alternative.
    pub fn answer(&mut self, atom: &Atom, answer: Answer) -> Result<(), SearchError> {
        if self.awaiting() != Some(atom) {
            return Err(SearchError::NotAwaiting(atom.clone()));
        }
        let mut st = self.awaiting.take().expect("awaiting state");
        self.answers.insert(atom.clone(), answer);
        self.log(Event::Answered { atom: atom.clone(), answer });
        match answer {
            Answer::Yes => {
                st.accept_pending();
                self.frontier.push(st);
                self.observe(atom.clone())?;
            }
            Answer::No => {
                self.kb.constraints.push(Constraint { body: vec![atom.clone()] });
                st.reject_pending();
                self.frontier.push(st);
                self.sweep_pending = true;
            }
            Answer::Unknown => {
                st.reject_pending();
                self.frontier.push(st);
            }
        }
        Ok(())
    }

    /// Runs until `k` explanations have been emitted or the search is
    /// exhausted, answering questions with `answerer`.
    pub fn run(&mut self, k: usize, mut answerer: impl FnMut(&Atom) -> Answer) -> Result<Vec<Explanation>, SearchError> {
        let mut out = Vec::new();
        while out.len() < k {
            match self.step()? {
                StepOutcome::Emitted(e) => out.push(e),
                StepOutcome::Ask(a) => {
                    let ans = answerer(&a);
                    self.answer(&a, ans)?;
                }
                StepOutcome::Exhausted => break,
                StepOutcome::Continue => {}
            }
        }
        Ok(out)
    }

    /// Non-interactive run: every question is answered `unknown`.
    pub fn run_unattended(&mut self, k: usize) -> Result<Vec<Explanation>, SearchError> {
        self.run(k, |_| Answer::Unknown)
    }
}

/// Posterior weights of probability-valued explanations relative to each
/// other: `value / sum(values)`, in input order.
pub fn renormalize(explanations: &[Explanation]) -> Result<Vec<f64>, SearchError> {
    if explanations.is_empty() {
        return Err(SearchError::EmptyList);
    }
    let values = explanations
        .iter()
        .map(|e| e.value.as_probability().ok_or(SearchError::NotProbability))
        .collect::<Result<Vec<f64>, _>>()?;
    let total: f64 = values.iter().sum();
    Ok(values.into_iter().map(|v| v / total).collect())
}

/// Re-checks an emitted explanation: the goal is provable from the facts
/// plus its assumptions, and no constraint is derivable.
pub fn verify(kb: &KnowledgeBase, goal: &[Atom], explanation: &Explanation, bound: u32) -> bool {
    let d = explanation.assumption_set();
    prove(goal, kb, &d, bound).is_proved() && !refutes(kb, &d, bound).is_inconsistent()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{parse_atom, parse_atoms, parse_kb};
    use crate::valuation::ValuatorKind;

    const KB1: &str = "hypothesis h1 : 0.1.\nhypothesis h2 : 0.5.\nhypothesis h3 : 0.5.\nfact g <- h1.\nfact g <- h2, h3.";

    fn session(kb: &str, goal: &str, kind: ValuatorKind) -> Session {
        let kb = parse_kb(kb).unwrap();
        let v = kind.build(&kb);
        Session::start(parse_atoms(goal).unwrap(), kb, v, Limits::default()).unwrap()
    }

    fn p(x: f64) -> Value {
        Value::Probability(x)
    }

    #[test]
    fn start_holds_one_state_at_initial_value() {
        let s = session(KB1, "g", ValuatorKind::Prob);
        assert_eq!(s.frontier().len(), 1);
        let root = s.frontier().iter().next().unwrap();
        assert_eq!(root.value(), &p(1.0));
        assert!(root.assumed().is_empty());
        assert_eq!(s.observations().len(), 1);
    }

    #[test]
    fn empty_goal_is_explained_by_nothing() {
        let mut s = session(KB1, "", ValuatorKind::Prob);
        let out = s.run_unattended(1).unwrap();
        assert_eq!(out, vec![Explanation { assumptions: vec![], value: p(1.0), bindings: vec![] }]);
    }

    #[test]
    fn invalid_kb_is_rejected() {
        let kb = parse_kb("hypothesis h : 0.1.\nhypothesis h : 0.2.").unwrap();
        let v = ValuatorKind::Prob.build(&kb);
        assert!(matches!(Session::start(vec![], kb, v, Limits::default()), Err(SearchError::InvalidKb(_))));
    }

    #[test]
    fn worked_example_emits_in_value_order() {
        let mut s = session(KB1, "g", ValuatorKind::Prob);
        let out = s.run_unattended(5).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].assumptions, parse_atoms("h2, h3").unwrap());
        assert!((out[0].value.as_probability().unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(out[1].assumptions, parse_atoms("h1").unwrap());
        assert!((out[1].value.as_probability().unwrap() - 0.1).abs() < 1e-15);
        assert!(audit(s.events()).is_clean());
    }

    #[test]
    fn facts_alone_explain_at_initial_value() {
        let mut s = session("fact g.", "g", ValuatorKind::Prob);
        let out = s.run_unattended(1).unwrap();
        assert_eq!(out[0].value, p(1.0));
        assert!(out[0].assumptions.is_empty());
    }

    #[test]
    fn sole_inconsistent_candidate_exhausts() {
        let mut s = session("hypothesis h1 : 0.5.\nfact g <- h1.\nfalse <- h1.", "g", ValuatorKind::Prob);
        assert!(s.run_unattended(1).unwrap().is_empty());
        assert!(s.is_finished());
        assert_eq!(s.events().last(), Some(&Event::Exhausted));
    }

    fn advance_to_assumption(s: &mut Session) -> ProofState {
        let mut st = s.schedule().unwrap();
        loop {
            match st.step(&s.kb, s.depth_bound()) {
                Machine::Assume => return st,
                Machine::Continue | Machine::Cut => {}
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn fork_takes_and_refuses() {
        let mut s = session("hypothesis h : 0.2.\nfact g <- h.", "g", ValuatorKind::Prob);
        let st = advance_to_assumption(&mut s);
        let fork = s.fork_on_assume(st).unwrap();
        let taken = fork.taken.unwrap();
        assert_eq!(taken.value(), &p(0.2));
        assert_eq!(taken.parent(), Some(fork.refused.seq()));
        assert_eq!(fork.refused.value(), &p(1.0));
        assert!(fork.refused.assumed().is_empty());
    }

    #[test]
    fn fork_kills_refutable_child() {
        let mut s = session("hypothesis h : 0.2.\nfact a.\nfact g <- h.\nfalse <- a, h.", "g", ValuatorKind::Prob);
        let st = advance_to_assumption(&mut s);
        let fork = s.fork_on_assume(st).unwrap();
        assert!(matches!(fork.taken, Err(KillReason::Inconsistent { constraint: 0 })));
        assert!(fork.refused.assumed().is_empty());
    }

    #[test]
    fn repeated_assumption_keeps_value() {
        // The second use of `h` resolves against the existing assumption
        // without forking.
        let mut s = session("hypothesis h : 0.2.\nfact g <- h, h.", "g", ValuatorKind::Prob);
        let out = s.run_unattended(1).unwrap();
        assert_eq!(out[0].value, p(0.2));
        let forks = s.events().iter().filter(|e| matches!(e, Event::Assumed { .. })).count();
        assert_eq!(forks, 1);
    }

    #[test]
    fn injection_revalues_and_suspends() {
        let mut s = session("hypothesis h : 0.2.\nfact g <- h.\nfalse <- o, h.", "g", ValuatorKind::Prob);
        // Run until the child holding h is suspended.
        while !s.frontier().iter().any(|st| !st.assumed().is_empty()) {
            s.step().unwrap();
        }
        s.inject_observation(parse_atom("o").unwrap()).unwrap();
        assert!(s.frontier().iter().all(|st| st.status() == Status::Suspended));
        assert_eq!(s.frontier().iter().find(|st| !st.assumed().is_empty()).unwrap().value(), &p(0.2));
        s.schedule();
        assert!(s.frontier().iter().all(|st| st.assumed().is_empty()));
        assert!(s.events().iter().any(|e| matches!(e, Event::Killed { reason: KillReason::Inconsistent { .. }, .. })));
    }

    #[test]
    fn injected_fact_can_replace_assumptions() {
        let mut s = session("hypothesis h : 0.1.\nfact g <- o.\nfact g <- h.", "g", ValuatorKind::Prob);
        // Let the root give up on `o` and fork on h.
        while !s.frontier().iter().any(|st| !st.assumed().is_empty()) {
            s.step().unwrap();
        }
        s.inject_observation(parse_atom("o").unwrap()).unwrap();
        let out = s.run_unattended(1).unwrap();
        assert_eq!(out[0].value, p(1.0));
        assert!(out[0].assumptions.is_empty());
    }

    #[test]
    fn questions_and_answers() {
        let kb = "askable dust/1.\nhypothesis allergy(P) : 0.1.\nhypothesis cold(P) : 0.08.\n\
                  fact sneeze(P) <- allergy(P), dust(P).\nfact sneeze(P) <- cold(P).";
        let mut s = session(kb, "sneeze(john)", ValuatorKind::Prob);
        let out = s.run(1, |_| Answer::Yes).unwrap();
        assert_eq!(out[0].assumptions, parse_atoms("allergy(john)").unwrap());
        assert!(s.kb().facts.iter().any(|c| c.head == parse_atom("dust(john)").unwrap()));

        let mut s = session(kb, "sneeze(john)", ValuatorKind::Prob);
        let out = s.run(1, |_| Answer::Unknown).unwrap();
        assert_eq!(out[0].assumptions, parse_atoms("cold(john)").unwrap());

        let mut s = session(kb, "sneeze(john)", ValuatorKind::Prob);
        let out = s.run(1, |_| Answer::No).unwrap();
        assert_eq!(out[0].assumptions, parse_atoms("cold(john)").unwrap());
        assert_eq!(s.kb().constraints.len(), 1);
    }

    #[test]
    fn step_while_awaiting_is_an_error() {
        let mut s = session("askable q/0.\nfact g <- q.", "g", ValuatorKind::Prob);
        loop {
            if let StepOutcome::Ask(a) = s.step().unwrap() {
                assert_eq!(a, Atom::prop("q"));
                break;
            }
        }
        assert!(matches!(s.step(), Err(SearchError::AnswerPending(_))));
        assert!(matches!(s.answer(&Atom::prop("r"), Answer::Yes), Err(SearchError::NotAwaiting(_))));
        s.answer(&Atom::prop("q"), Answer::Yes).unwrap();
        assert_eq!(s.run_unattended(1).unwrap()[0].value, p(1.0));
    }

    #[test]
    fn answer_bindings() {
        let mut s = session("hypothesis bat(X) : 0.5.\nfact animal(dracula).\nfact flies(X) <- animal(X), bat(X).", "flies(Who)", ValuatorKind::Prob);
        let out = s.run_unattended(1).unwrap();
        assert_eq!(out[0].bindings, vec![("Who".to_string(), Term::constant("dracula"))]);
    }

    #[test]
    fn deepening_restarts_at_larger_bound() {
        // A chain longer than the first bound.
        let mut text = String::from("hypothesis h : 0.5.\nfact p0 <- h.\n");
        for i in 1..20 {
            text.push_str(&format!("fact p{i} <- p{}.\n", i - 1));
        }
        let kb = parse_kb(&text).unwrap();
        let v = ValuatorKind::Prob.build(&kb);
        let mut s = Session::start(vec![Atom::prop("p19")], kb, v, Limits { initial_depth: 4, ..Limits::default() }).unwrap();
        let out = s.run_unattended(1).unwrap();
        assert_eq!(out.len(), 1);
        assert!(s.depth_bound() >= 32);
        assert!(s.events().iter().any(|e| matches!(e, Event::Restarted { depth_bound: 8 })));
    }

    #[test]
    fn step_budget_is_reported() {
        let kb = parse_kb("fact p <- p.").unwrap();
        let v = ValuatorKind::Null.build(&kb);
        let limits = Limits { step_budget: 10, ..Limits::default() };
        let mut s = Session::start(vec![Atom::prop("p")], kb, v, limits).unwrap();
        assert_eq!(s.run_unattended(1), Err(SearchError::StepBudgetExceeded(10)));
    }

    #[test]
    fn depth_schedule_doubles() {
        assert_eq!(Limits::default().depth_schedule(), vec![16, 32, 64]);
        assert_eq!(Limits { initial_depth: 16, max_depth: 100, ..Limits::default() }.depth_schedule(), vec![16, 32, 64, 100]);
    }

    fn expl(v: f64) -> Explanation {
        Explanation { assumptions: vec![], value: p(v), bindings: vec![] }
    }

    #[test]
    fn renormalize_examples() {
        let w = renormalize(&[expl(0.25), expl(0.1)]).unwrap();
        assert!((w[0] - 0.25 / 0.35).abs() < 1e-15 && (w[1] - 0.1 / 0.35).abs() < 1e-15);
        assert_eq!(renormalize(&[expl(0.3)]).unwrap(), vec![1.0]);
        assert_eq!(renormalize(&[expl(0.2), expl(0.2)]).unwrap(), vec![0.5, 0.5]);
        assert_eq!(renormalize(&[]), Err(SearchError::EmptyList));
    }
}
