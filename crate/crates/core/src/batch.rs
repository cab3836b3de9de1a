//! Running many independent explanation searches at once.

use crate::kb::KnowledgeBase;
use crate::oracle::Execution;
use crate::search::{Explanation, Limits, SearchError, Session};
use crate::term::Atom;
use crate::valuation::ValuatorKind;

#[derive(Clone, Debug)]
pub struct Job {
    pub kb: KnowledgeBase,
    pub goal: Vec<Atom>,
    pub valuator: ValuatorKind,
    pub limits: Limits,
    pub top_k: usize,
}

impl Job {
    pub fn new(kb: KnowledgeBase, goal: Vec<Atom>) -> Self {
        Job { kb, goal, valuator: ValuatorKind::Prob, limits: Limits::default(), top_k: 1 }
    }

    /// Runs the job unattended: every question is answered `unknown`.
    pub fn run(&self) -> Result<Vec<Explanation>, SearchError> {
        let v = self.valuator.build(&self.kb);
        let mut s = Session::start(self.goal.clone(), self.kb.clone(), v, self.limits.clone())?;
        s.run_unattended(self.top_k)
    }
}

/// Results in job order.
pub fn explain_all(jobs: &[Job], exec: Execution) -> Vec<Result<Vec<Explanation>, SearchError>> {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            jobs.par_iter().map(Job::run).collect()
        }
        _ => jobs.iter().map(Job::run).collect(),
    }
}
