//! Brute-force explanation enumerator used as ground truth in tests.
//!
//! The knowledge base is grounded over its constants, then every subset of
//! the relevant ground hypotheses up to a size cap is checked for
//! entailment of the goal and consistency. Nothing here goes through the
//! resolution machinery in `logic`; matching and model computation are
//! written separately so disagreements point at one side.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::kb::KnowledgeBase;
use crate::term::{Atom, Term, Var};
use crate::valuation::{chain_probability, ValuationError};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum OracleError {
    #[error("grounding produced more than {limit} atoms")]
    GroundingExplosion { limit: usize },
    #[error("function symbols cannot be grounded finitely: {0}")]
    FunctionSymbols(String),
    #[error("{count} relevant hypothesis instances exceed the limit of {limit}")]
    TooManyHypotheses { count: usize, limit: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleLimits {
    pub max_ground_atoms: usize,
    pub max_hypotheses: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_ground_atoms: 50_000, max_hypotheses: 24 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Subsets are checked on the rayon pool. Without the `parallel`
    /// feature this runs sequentially.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleEntry {
    pub assumptions: BTreeSet<Atom>,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct OracleResult {
    /// Explanations, highest value first, then smaller, then in term order.
    pub entries: Vec<OracleEntry>,
    /// Explanations left out because the valuation rejects them.
    pub unvalued: usize,
}

impl OracleResult {
    pub fn best(&self) -> Option<&OracleEntry> {
        self.entries.first()
    }
}

const GOAL: &str = "$goal";

/// A propositional program: ground rule instances that can fire at all, the
/// ground constraints, and the hypothesis instances that occur in rule
/// bodies. A hypothesis that only occurs in constraints can never help an
/// explanation, so subsets containing it are not enumerated.
#[derive(Clone, Debug)]
pub struct GroundProgram {
    atoms: Vec<Atom>,
    ids: HashMap<Atom, usize>,
    facts: Vec<usize>,
    rules: Vec<(usize, Vec<usize>)>,
    watch: Vec<Vec<usize>>,
    constraints: Vec<Vec<usize>>,
    goal: usize,
    hypotheses: Vec<Atom>,
    hyp_ids: Vec<usize>,
}

type Binding = HashMap<Var, Term>;

fn match_term(pattern: &Term, ground: &Term, b: &mut Binding) -> bool {
    match (pattern, ground) {
        (Term::Var(v), _) => match b.get(v) {
            Some(t) => t == ground,
            None => {
                b.insert(v.clone(), ground.clone());
                true
            }
        },
        (Term::Const(c), Term::Const(d)) => c == d,
        _ => false,
    }
}

fn match_atom(pattern: &Atom, ground: &Atom, b: &mut Binding) -> bool {
    pattern.pred == ground.pred
        && pattern.args.len() == ground.args.len()
        && pattern.args.iter().zip(&ground.args).all(|(p, g)| match_term(p, g, b))
}

fn instantiate(a: &Atom, b: &Binding) -> Atom {
    Atom {
        pred: a.pred.clone(),
        args: a
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => b.get(v).cloned().unwrap_or_else(|| t.clone()),
                _ => t.clone(),
            })
            .collect(),
    }
}

fn check_function_free(a: &Atom) -> Result<(), OracleError> {
    if a.args.iter().any(|t| matches!(t, Term::App(..))) {
        return Err(OracleError::FunctionSymbols(a.to_string()));
    }
    Ok(())
}

struct Model {
    atoms: BTreeSet<Atom>,
    by_key: HashMap<(crate::term::Symbol, usize), Vec<Atom>>,
}

impl Model {
    fn new() -> Self {
        Model { atoms: BTreeSet::new(), by_key: HashMap::new() }
    }

    fn insert(&mut self, a: Atom) -> bool {
        if self.atoms.insert(a.clone()) {
            self.by_key.entry(a.key()).or_default().push(a);
            true
        } else {
            false
        }
    }

    /// Every binding under which all of `body` holds.
    fn matches(&self, body: &[Atom]) -> Vec<Binding> {
        let mut out = Vec::new();
        self.join(body, Binding::new(), &mut out);
        out
    }

    fn join(&self, body: &[Atom], b: Binding, out: &mut Vec<Binding>) {
        let Some((first, rest)) = body.split_first() else {
            out.push(b);
            return;
        };
        for g in self.by_key.get(&first.key()).map(Vec::as_slice).unwrap_or(&[]) {
            let mut b2 = b.clone();
            if match_atom(first, g, &mut b2) {
                self.join(rest, b2, out);
            }
        }
    }
}

/// All completions of `b` that bind every variable of `vars` to a constant.
fn complete(b: Binding, vars: &[Var], constants: &[Term]) -> Vec<Binding> {
    let mut out = vec![b];
    for v in vars {
        if out[0].contains_key(v) {
            continue;
        }
        out = out
            .into_iter()
            .flat_map(|b| {
                constants.iter().map(move |c| {
                    let mut b = b.clone();
                    b.insert(v.clone(), c.clone());
                    b
                })
            })
            .collect();
    }
    out
}

impl GroundProgram {
    pub fn ground(kb: &KnowledgeBase, goal: &[Atom], limits: &OracleLimits) -> Result<GroundProgram, OracleError> {
        let mut constants: BTreeSet<Term> = BTreeSet::new();
        let all_atoms = kb
            .facts
            .iter()
            .flat_map(|c| std::iter::once(&c.head).chain(&c.body))
            .chain(kb.constraints.iter().flat_map(|c| &c.body))
            .chain(kb.hypotheses.iter().map(|h| &h.pattern))
            .chain(goal);
        for a in all_atoms {
            check_function_free(a)?;
            constants.extend(a.args.iter().filter(|t| matches!(t, Term::Const(_))).cloned());
        }
        let constants: Vec<Term> = constants.into_iter().collect();
        let explode = || OracleError::GroundingExplosion { limit: limits.max_ground_atoms };

        // Every hypothesis instance over the constants.
        let mut all_hyps: BTreeSet<Atom> = BTreeSet::new();
        for h in &kb.hypotheses {
            let vars = h.pattern.vars();
            let count = (constants.len() as f64).powi(vars.len() as i32);
            if count > limits.max_ground_atoms as f64 {
                return Err(explode());
            }
            for b in complete(Binding::new(), &vars, &constants) {
                all_hyps.insert(instantiate(&h.pattern, &b));
            }
        }

        // Least model of the facts plus all hypotheses; record each rule
        // instance that fires on the way.
        let mut model = Model::new();
        for h in &all_hyps {
            model.insert(h.clone());
        }
        let mut fired: BTreeSet<(Atom, Vec<Atom>)> = BTreeSet::new();
        loop {
            let mut fresh = Vec::new();
            for c in &kb.facts {
                for b in model.matches(&c.body) {
                    for b in complete(b, &c.head.vars(), &constants) {
                        let head = instantiate(&c.head, &b);
                        let body: Vec<Atom> = c.body.iter().map(|a| instantiate(a, &b)).collect();
                        if fired.insert((head.clone(), body)) {
                            fresh.push(head);
                        }
                    }
                }
                if fired.len() > limits.max_ground_atoms {
                    return Err(explode());
                }
            }
            let mut grew = false;
            for a in fresh {
                grew |= model.insert(a);
            }
            if model.atoms.len() > limits.max_ground_atoms {
                return Err(explode());
            }
            if !grew {
                break;
            }
        }

        let goal_atom = Atom::prop(GOAL);
        for b in model.matches(goal) {
            let body = goal.iter().map(|a| instantiate(a, &b)).collect();
            fired.insert((goal_atom.clone(), body));
        }
        let mut ground_constraints: BTreeSet<Vec<Atom>> = BTreeSet::new();
        for c in &kb.constraints {
            for b in model.matches(&c.body) {
                ground_constraints.insert(c.body.iter().map(|a| instantiate(a, &b)).collect());
            }
        }

        let mut prog = GroundProgram {
            atoms: Vec::new(),
            ids: HashMap::new(),
            facts: Vec::new(),
            rules: Vec::new(),
            watch: Vec::new(),
            constraints: Vec::new(),
            goal: 0,
            hypotheses: Vec::new(),
            hyp_ids: Vec::new(),
        };
        prog.goal = prog.intern(&goal_atom);
        let mut relevant: BTreeSet<Atom> = BTreeSet::new();
        for (head, body) in &fired {
            let h = prog.intern(head);
            let mut ids: Vec<usize> = body.iter().map(|a| prog.intern(a)).collect();
            ids.sort_unstable();
            ids.dedup();
            relevant.extend(body.iter().filter(|a| all_hyps.contains(*a)).cloned());
            if ids.is_empty() {
                prog.facts.push(h);
            } else {
                prog.rules.push((h, ids));
            }
        }
        for body in &ground_constraints {
            let mut ids: Vec<usize> = body.iter().map(|a| prog.intern(a)).collect();
            ids.sort_unstable();
            ids.dedup();
            prog.constraints.push(ids);
        }
        for h in relevant {
            let id = prog.intern(&h);
            prog.hypotheses.push(h);
            prog.hyp_ids.push(id);
        }
        prog.watch = vec![Vec::new(); prog.atoms.len()];
        for (r, (_, body)) in prog.rules.iter().enumerate() {
            for &a in body {
                prog.watch[a].push(r);
            }
        }
        Ok(prog)
    }

    fn intern(&mut self, a: &Atom) -> usize {
        if let Some(&i) = self.ids.get(a) {
            return i;
        }
        self.atoms.push(a.clone());
        self.ids.insert(a.clone(), self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    /// Ground hypothesis instances that occur in some rule body, in term
    /// order.
    pub fn hypotheses(&self) -> &[Atom] {
        &self.hypotheses
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn propagate(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut truth = vec![false; self.atoms.len()];
        let mut remaining: Vec<usize> = self.rules.iter().map(|(_, b)| b.len()).collect();
        let mut queue: Vec<usize> = self.facts.clone();
        queue.extend(seeds);
        while let Some(a) = queue.pop() {
            if truth[a] {
                continue;
            }
            truth[a] = true;
            for &r in &self.watch[a] {
                remaining[r] -= 1;
                if remaining[r] == 0 {
                    queue.push(self.rules[r].0);
                }
            }
        }
        truth
    }

    fn truth_of(&self, d: &BTreeSet<Atom>) -> Vec<bool> {
        self.propagate(d.iter().filter_map(|a| self.ids.get(a).copied()))
    }

    fn check_truth(&self, m: &[bool]) -> (bool, bool) {
        let consistent = !self.constraints.iter().any(|c| c.iter().all(|&a| m[a]));
        (m[self.goal], consistent)
    }

    fn check_mask(&self, mask: u64) -> (bool, bool) {
        let seeds = self.hyp_ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a);
        self.check_truth(&self.propagate(seeds))
    }

    /// Least model of the facts plus `d`. Atoms of `d` that occur nowhere in
    /// the program are added as they are.
    pub fn least_model(&self, d: &BTreeSet<Atom>) -> BTreeSet<Atom> {
        let truth = self.truth_of(d);
        let mut out: BTreeSet<Atom> = (0..truth.len())
            .filter(|&i| truth[i] && i != self.goal)
            .map(|i| self.atoms[i].clone())
            .collect();
        out.extend(d.iter().cloned());
        out
    }

    /// Whether the facts plus `d` entail the goal.
    pub fn entails(&self, d: &BTreeSet<Atom>) -> bool {
        self.check_truth(&self.truth_of(d)).0
    }

    /// Whether no constraint is violated by the facts plus `d`.
    pub fn consistent(&self, d: &BTreeSet<Atom>) -> bool {
        self.check_truth(&self.truth_of(d)).1
    }

    /// Entailment and consistency by enumerating every truth assignment of
    /// the ground atoms. `None` when there are more than `max_atoms` atoms.
    pub fn check_by_models(&self, d: &BTreeSet<Atom>, max_atoms: usize) -> Option<(bool, bool)> {
        let n = self.atoms.len();
        if n > max_atoms || n >= 64 {
            return None;
        }
        let forced: Vec<usize> =
            self.facts.iter().copied().chain(d.iter().filter_map(|a| self.ids.get(a).copied())).collect();
        let mut any_model = false;
        let mut goal_everywhere = true;
        for assignment in 0u64..(1u64 << n) {
            let t = |i: usize| assignment >> i & 1 == 1;
            if !forced.iter().all(|&i| t(i)) {
                continue;
            }
            if !self.rules.iter().all(|(h, b)| t(*h) || !b.iter().all(|&a| t(a))) {
                continue;
            }
            if self.constraints.iter().any(|c| c.iter().all(|&a| t(a))) {
                continue;
            }
            any_model = true;
            if !t(self.goal) {
                goal_everywhere = false;
                break;
            }
        }
        // An inconsistent theory entails everything.
        Some((goal_everywhere, any_model))
    }
}

/// All explanations of `goal` with at most `max_size` assumptions, valued by
/// the chain-rule probability.
pub fn enumerate_explanations(kb: &KnowledgeBase, goal: &[Atom], max_size: usize) -> Result<OracleResult, OracleError> {
    enumerate_explanations_with(kb, goal, max_size, &OracleLimits::default(), Execution::default())
}

pub fn enumerate_explanations_with(
    kb: &KnowledgeBase,
    goal: &[Atom],
    max_size: usize,
    limits: &OracleLimits,
    exec: Execution,
) -> Result<OracleResult, OracleError> {
    let prog = GroundProgram::ground(kb, goal, limits)?;
    let n = prog.hypotheses.len();
    if n > limits.max_hypotheses {
        return Err(OracleError::TooManyHypotheses { count: n, limit: limits.max_hypotheses });
    }
    let check = |mask: u64| -> Option<Result<OracleEntry, ValuationError>> {
        if mask.count_ones() as usize > max_size {
            return None;
        }
        let (entails, consistent) = prog.check_mask(mask);
        if !(entails && consistent) {
            return None;
        }
        let d: BTreeSet<Atom> =
            (0..n).filter(|i| mask >> i & 1 == 1).map(|i| prog.hypotheses[i].clone()).collect();
        Some(chain_probability(&d, &kb.prob_decls, &kb.hypotheses).map(|value| OracleEntry { assumptions: d, value }))
    };
    let total = 1u64 << n;
    let found: Vec<Result<OracleEntry, ValuationError>> = match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..total).into_par_iter().filter_map(check).collect()
        }
        _ => (0..total).filter_map(check).collect(),
    };
    let mut result = OracleResult::default();
    for r in found {
        match r {
            Ok(e) => result.entries.push(e),
            Err(_) => result.unvalued += 1,
        }
    }
    result.entries.sort_by(|a, b| {
        b.value
            .total_cmp(&a.value)
            .then(a.assumptions.len().cmp(&b.assumptions.len()))
            .then_with(|| a.assumptions.cmp(&b.assumptions))
    });
    Ok(result)
}

/// Rows `rank,size,value,assumptions` for the sorted table.
pub fn write_csv<W: std::io::Write>(result: &OracleResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "size", "value", "assumptions"])?;
    for (i, e) in result.entries.iter().enumerate() {
        let names: Vec<String> = e.assumptions.iter().map(|a| a.to_string()).collect();
        w.write_record([(i + 1).to_string(), e.assumptions.len().to_string(), e.value.to_string(), names.join(" ")])?;
    }
    w.flush()?;
    Ok(())
}

/// Groups the entries by size, for quick inspection in tests.
pub fn by_size(result: &OracleResult) -> BTreeMap<usize, Vec<&OracleEntry>> {
    let mut m: BTreeMap<usize, Vec<&OracleEntry>> = BTreeMap::new();
    for e in &result.entries {
        m.entry(e.assumptions.len()).or_default().push(e);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{parse_atoms, parse_kb};

    fn run(kb: &str, goal: &str) -> OracleResult {
        enumerate_explanations(&parse_kb(kb).unwrap(), &parse_atoms(goal).unwrap(), 6).unwrap()
    }

    fn set(t: &str) -> BTreeSet<Atom> {
        parse_atoms(t).unwrap().into_iter().collect()
    }

    const KB1: &str = "hypothesis h1 : 0.1.\nhypothesis h2 : 0.5.\nhypothesis h3 : 0.5.\nfact g <- h1.\nfact g <- h2, h3.";

    #[test]
    fn worked_example_by_hand() {
        let r = run(KB1, "g");
        // {h2,h3}, {h1}, and the three supersets containing h1.
        let got: Vec<(BTreeSet<Atom>, f64)> = r.entries.iter().map(|e| (e.assumptions.clone(), e.value)).collect();
        assert_eq!(got.len(), 5);
        assert_eq!(got[0].0, set("h2, h3"));
        assert!((got[0].1 - 0.25).abs() < 1e-15);
        assert_eq!(got[1].0, set("h1"));
        assert!((got[1].1 - 0.1).abs() < 1e-15);
        assert_eq!(got[4].0, set("h1, h2, h3"));
    }

    #[test]
    fn nothing_entails_goal() {
        assert!(run("hypothesis h : 0.5.\nfact g <- h, q.", "g").entries.is_empty());
    }

    #[test]
    fn fact_goal_has_empty_explanation_first() {
        let r = run("fact g.", "g");
        assert_eq!(r.best().unwrap(), &OracleEntry { assumptions: BTreeSet::new(), value: 1.0 });
    }

    #[test]
    fn constraints_remove_subsets() {
        let r = run("hypothesis a : 0.9.\nhypothesis b : 0.2.\nfact g <- a.\nfact g <- b.\nfalse <- a.", "g");
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].assumptions, set("b"));
    }

    #[test]
    fn grounds_variables_over_constants() {
        let kb = "hypothesis bat(X) : 0.5.\nhypothesis bird(X) : 0.4.\nfact animal(dracula).\nfact animal(tweety).\n\
                  fact flies(X) <- animal(X), bat(X).\nfact flies(X) <- animal(X), bird(X).";
        let r = run(kb, "flies(dracula)");
        assert_eq!(r.best().unwrap().assumptions, set("bat(dracula)"));
        let prog = GroundProgram::ground(&parse_kb(kb).unwrap(), &parse_atoms("flies(dracula)").unwrap(), &OracleLimits::default()).unwrap();
        // Instances about tweety fire too, but the goal only needs dracula's.
        assert_eq!(prog.hypotheses().len(), 4);
        assert!(prog.entails(&set("bird(dracula)")));
        assert!(!prog.entails(&set("bird(tweety)")));
    }

    #[test]
    fn goal_with_variables_is_existential() {
        let r = run("hypothesis bat(X) : 0.5.\nfact animal(d).\nfact flies(X) <- animal(X), bat(X).", "flies(Y)");
        assert_eq!(r.best().unwrap().assumptions, set("bat(d)"));
    }

    #[test]
    fn function_symbols_are_rejected() {
        let kb = parse_kb("fact p(f(a)).").unwrap();
        assert!(matches!(enumerate_explanations(&kb, &parse_atoms("p(X)").unwrap(), 2), Err(OracleError::FunctionSymbols(_))));
    }

    #[test]
    fn explosion_is_reported() {
        let kb = parse_kb("hypothesis r(X, Y, Z) : 0.5.\nfact c(a). fact c(b). fact c(d). fact c(e).").unwrap();
        let limits = OracleLimits { max_ground_atoms: 10, ..OracleLimits::default() };
        assert!(matches!(
            enumerate_explanations_with(&kb, &[], 1, &limits, Execution::Sequential),
            Err(OracleError::GroundingExplosion { .. })
        ));
    }

    #[test]
    fn size_cap() {
        let r = enumerate_explanations(&parse_kb(KB1).unwrap(), &parse_atoms("g").unwrap(), 1).unwrap();
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn model_enumeration_agrees_with_least_model() {
        let kb = parse_kb(
            "hypothesis a : 0.5.\nhypothesis b : 0.5.\nhypothesis c : 0.5.\nfact p <- a, b.\nfact q <- p.\nfact g <- q, c.\nfact g <- b, c.\nfalse <- a, c.",
        )
        .unwrap();
        let prog = GroundProgram::ground(&kb, &parse_atoms("g").unwrap(), &OracleLimits::default()).unwrap();
        for mask in 0u64..8 {
            let d: BTreeSet<Atom> = (0..3).filter(|i| mask >> i & 1 == 1).map(|i| prog.hypotheses()[i].clone()).collect();
            let (e, c) = prog.check_by_models(&d, 16).unwrap();
            assert_eq!(c, prog.consistent(&d), "{d:?}");
            if c {
                assert_eq!(e, prog.entails(&d), "{d:?}");
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let kb = parse_kb(KB1).unwrap();
        let g = parse_atoms("g").unwrap();
        let a = enumerate_explanations_with(&kb, &g, 3, &OracleLimits::default(), Execution::Sequential).unwrap();
        let b = enumerate_explanations_with(&kb, &g, 3, &OracleLimits::default(), Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_table() {
        let mut out = Vec::new();
        write_csv(&run(KB1, "g"), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("rank,size,value,assumptions"));
        assert_eq!(lines.next(), Some("1,2,0.25,h2 h3"));
        assert_eq!(lines.next(), Some("2,1,0.1,h1"));
    }
}
