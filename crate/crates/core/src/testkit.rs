//! Seeded generators of small propositional knowledge bases.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kb::{has_errors, validate, Clause, Constraint, HypothesisSchema, KnowledgeBase, ProbDecl};
use crate::oracle::{enumerate_explanations, OracleError};
use crate::term::Atom;

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_hypotheses: usize,
    pub max_clauses: usize,
    pub max_constraints: usize,
    /// Also declare conditional probabilities. Declarations the validator
    /// rejects are dropped again.
    pub conditionals: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_hypotheses: 6, max_clauses: 12, max_constraints: 3, conditionals: false }
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub kb: KnowledgeBase,
    pub goal: Vec<Atom>,
    /// Body atoms no clause defines; good candidates for injected
    /// observations.
    pub undefined: Vec<Atom>,
}

/// A random KB over hypotheses `h0..`, derived atoms `p0..` and undefined
/// atoms `e0..e2`. A clause for `p_i` only mentions `p_j` with `j < i`, so
/// every proof is shorter than the number of clauses.
pub fn random_kb(seed: u64, cfg: &GenConfig) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nh = rng.gen_range(1..=cfg.max_hypotheses);
    let nc = rng.gen_range(1..=cfg.max_clauses);
    let nk = rng.gen_range(0..=cfg.max_constraints);
    let np = rng.gen_range(1..=nc.min(5));

    let hyps: Vec<Atom> = (0..nh).map(|i| Atom::prop(&format!("h{i}"))).collect();
    let preds: Vec<Atom> = (0..np).map(|i| Atom::prop(&format!("p{i}"))).collect();
    let undefined: Vec<Atom> = (0..3).map(|i| Atom::prop(&format!("e{i}"))).collect();

    let mut kb = KnowledgeBase::default();
    for h in &hyps {
        kb.hypotheses.push(HypothesisSchema::new(h.clone(), rng.gen_range(0.05..0.95)));
    }

    let body_atom = |rng: &mut ChaCha8Rng, below: usize| -> Atom {
        let roll = rng.gen_range(0..10);
        if roll < 6 || (below == 0 && roll < 9) {
            hyps.choose(rng).unwrap().clone()
        } else if roll < 9 {
            preds[rng.gen_range(0..below)].clone()
        } else {
            undefined.choose(rng).unwrap().clone()
        }
    };

    // Every p_i gets at least one clause; the rest go to random heads.
    for i in 0..nc {
        let head = if i < np { i } else { rng.gen_range(0..np) };
        let len = rng.gen_range(0..=3);
        let body: Vec<Atom> = (0..len).map(|_| body_atom(&mut rng, head)).collect();
        if body.is_empty() && rng.gen_bool(0.7) {
            // Keep unconditional facts rare.
            kb.facts.push(Clause::rule(preds[head].clone(), vec![body_atom(&mut rng, head)]));
        } else {
            kb.facts.push(Clause::rule(preds[head].clone(), body));
        }
    }
    for _ in 0..nk {
        let len = rng.gen_range(1..=3);
        let body = (0..len).map(|_| body_atom(&mut rng, np)).collect();
        kb.constraints.push(Constraint { body });
    }

    if cfg.conditionals && nh >= 2 {
        for _ in 0..rng.gen_range(1..=3) {
            let i = rng.gen_range(0..nh - 1);
            let j = rng.gen_range(i + 1..nh);
            let prior = kb.hypotheses[j].prior;
            let probability = if rng.gen_bool(0.5) {
                rng.gen_range(0.01..=prior)
            } else {
                (prior * rng.gen_range(1.0..2.0)).min(1.0)
            };
            kb.prob_decls.push(ProbDecl::Conditional { target: hyps[j].clone(), given: hyps[i].clone(), probability });
        }
        if has_errors(&validate(&kb)) {
            kb.prob_decls.clear();
        }
    }

    let top = np - 1;
    let goal = if np > 1 && rng.gen_bool(0.3) {
        vec![preds[top].clone(), preds[rng.gen_range(0..top)].clone()]
    } else {
        vec![preds[top].clone()]
    };
    Generated { kb, goal, undefined }
}

/// A copy of `kb` plus the constraint `false <- D`, where `D` is the best
/// explanation of `goal` when constraints are ignored. `None` when that
/// explanation is empty or there is none.
pub fn block_unconstrained_best(kb: &KnowledgeBase, goal: &[Atom]) -> Result<Option<KnowledgeBase>, OracleError> {
    let mut free = kb.clone();
    free.constraints.clear();
    let table = enumerate_explanations(&free, goal, usize::MAX)?;
    let Some(best) = table.best() else { return Ok(None) };
    if best.assumptions.is_empty() {
        return Ok(None);
    }
    let mut blocked = kb.clone();
    blocked.constraints.push(Constraint { body: best.assumptions.iter().cloned().collect() });
    Ok(Some(blocked))
}
