//! A small depth-bounded Prolog interpreter, written apart from the crate's
//! own resolution code: its own terms, bindings and trail.
//!
//! Semantics: leftmost goal, clauses in order, occurs check, and a goal at
//! depth `d` is only expanded when `d < bound` (the query is at depth 0).

use std::collections::HashMap;

use abduce::{Atom, KnowledgeBase, Term};

#[derive(Clone, Debug, PartialEq)]
enum T {
    V(usize),
    F(String, Vec<T>),
}

struct Machine {
    clauses: Vec<(T, Vec<T>, usize)>,
    store: Vec<Option<T>>,
    trail: Vec<usize>,
    bound: u32,
    bound_hit: bool,
    answers: Vec<String>,
    max_answers: usize,
    query_vars: Vec<usize>,
}

fn convert(t: &Term, vars: &mut HashMap<String, usize>) -> T {
    match t {
        Term::Var(v) => {
            let n = vars.len();
            T::V(*vars.entry(v.to_string()).or_insert(n))
        }
        Term::Const(c) => T::F(c.to_string(), vec![]),
        Term::App(f, args) => T::F(f.to_string(), args.iter().map(|a| convert(a, vars)).collect()),
    }
}

fn convert_atom(a: &Atom, vars: &mut HashMap<String, usize>) -> T {
    T::F(format!("{}/{}", a.pred, a.args.len()), a.args.iter().map(|t| convert(t, vars)).collect())
}

fn offset(t: &T, by: usize) -> T {
    match t {
        T::V(i) => T::V(i + by),
        T::F(f, args) => T::F(f.clone(), args.iter().map(|a| offset(a, by)).collect()),
    }
}

impl Machine {
    fn walk(&self, t: &T) -> T {
        let mut t = t.clone();
        while let T::V(i) = t {
            match &self.store[i] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, v: usize, t: &T) -> bool {
        match self.walk(t) {
            T::V(i) => i == v,
            T::F(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn bind(&mut self, v: usize, t: T) {
        self.store[v] = Some(t);
        self.trail.push(v);
    }

    fn unify(&mut self, a: &T, b: &T) -> bool {
        let (a, b) = (self.walk(a), self.walk(b));
        match (&a, &b) {
            (T::V(i), T::V(j)) if i == j => true,
            (T::V(i), _) => {
                if self.occurs(*i, &b) {
                    return false;
                }
                self.bind(*i, b.clone());
                true
            }
            (_, T::V(j)) => {
                if self.occurs(*j, &a) {
                    return false;
                }
                self.bind(*j, a.clone());
                true
            }
            (T::F(f, xs), T::F(g, ys)) => f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify(x, y)),
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().unwrap();
            self.store[v] = None;
        }
    }

    fn resolve(&self, t: &T) -> T {
        match self.walk(t) {
            T::V(i) => T::V(i),
            T::F(f, args) => T::F(f, args.iter().map(|a| self.resolve(a)).collect()),
        }
    }

    fn record(&mut self) {
        let terms: Vec<T> = self.query_vars.iter().map(|&v| self.resolve(&T::V(v))).collect();
        let mut names = HashMap::new();
        let parts: Vec<String> = terms.iter().map(|t| render(t, &mut names)).collect();
        self.answers.push(parts.join(" ; "));
    }

    fn done(&self) -> bool {
        self.answers.len() >= self.max_answers
    }

    fn solve(&mut self, goals: &[(T, u32)]) {
        if self.done() {
            return;
        }
        let Some(((goal, depth), rest)) = goals.split_first() else {
            self.record();
            return;
        };
        if *depth >= self.bound {
            self.bound_hit = true;
            return;
        }
        for i in 0..self.clauses.len() {
            let (head, body, nvars) = self.clauses[i].clone();
            let base = self.store.len();
            self.store.extend(std::iter::repeat_n(None, nvars));
            let mark = self.trail.len();
            if self.unify(goal, &offset(&head, base)) {
                let mut next: Vec<(T, u32)> = body.iter().map(|b| (offset(b, base), depth + 1)).collect();
                next.extend(rest.iter().cloned());
                self.solve(&next);
            }
            self.undo(mark);
            if self.done() {
                return;
            }
        }
    }
}

/// Variables are numbered by first appearance across the whole answer.
fn render(t: &T, names: &mut HashMap<usize, usize>) -> String {
    match t {
        T::V(i) => {
            let n = names.len();
            format!("_{}", names.entry(*i).or_insert(n))
        }
        T::F(f, args) if args.is_empty() => f.clone(),
        T::F(f, args) => format!("{f}({})", args.iter().map(|a| render(a, names)).collect::<Vec<_>>().join(",")),
    }
}

/// The same rendering for the crate's terms, so answers compare as strings.
pub fn canonical(terms: &[Term]) -> String {
    let mut vars = HashMap::new();
    let converted: Vec<T> = terms.iter().map(|t| convert(t, &mut vars)).collect();
    let mut names = HashMap::new();
    converted.iter().map(|t| render(t, &mut names)).collect::<Vec<_>>().join(" ; ")
}

#[derive(Debug, PartialEq)]
pub struct Outcome {
    /// Answers for the query variables, in order of discovery.
    pub answers: Vec<String>,
    pub bound_hit: bool,
}

pub fn solve(kb: &KnowledgeBase, query: &[Atom], bound: u32, max_answers: usize) -> Outcome {
    let clauses = kb
        .facts
        .iter()
        .map(|c| {
            let mut vars = HashMap::new();
            let head = convert_atom(&c.head, &mut vars);
            let body = c.body.iter().map(|b| convert_atom(b, &mut vars)).collect();
            (head, body, vars.len())
        })
        .collect();
    let mut vars = HashMap::new();
    let goals: Vec<(T, u32)> = query.iter().map(|a| (convert_atom(a, &mut vars), 0)).collect();
    let mut ordered: Vec<(String, usize)> = vars.into_iter().collect();
    ordered.sort_by_key(|(_, i)| *i);
    let mut m = Machine {
        clauses,
        store: vec![None; ordered.len()],
        trail: Vec::new(),
        bound,
        bound_hit: false,
        answers: Vec::new(),
        max_answers,
        query_vars: ordered.iter().map(|(_, i)| *i).collect(),
    };
    m.solve(&goals);
    Outcome { answers: m.answers, bound_hit: m.bound_hit }
}

/// Definite-clause programs with a query each.
pub const PROGRAMS: [(&str, &str); 20] = [
    (
        "fact parent(tom, bob). fact parent(bob, ann). fact parent(bob, pat). fact parent(pat, jim).
         fact anc(X, Y) <- parent(X, Y). fact anc(X, Y) <- parent(X, Z), anc(Z, Y).",
        "anc(tom, W)",
    ),
    (
        "fact append(nil, L, L). fact append(cons(H, T), L, cons(H, R)) <- append(T, L, R).",
        "append(X, Y, cons(a, cons(b, nil)))",
    ),
    (
        "fact member(X, cons(X, T)). fact member(X, cons(H, T)) <- member(X, T).",
        "member(Z, cons(a, cons(b, cons(c, nil))))",
    ),
    ("fact nat(z). fact nat(s(X)) <- nat(X).", "nat(N)"),
    (
        "fact plus(z, Y, Y). fact plus(s(X), Y, s(Z)) <- plus(X, Y, Z).",
        "plus(A, B, s(s(s(z))))",
    ),
    ("fact p(X) <- p(X). fact p(a).", "p(a)"),
    (
        "fact edge(a, b). fact edge(b, c). fact edge(c, a). fact edge(c, d).
         fact path(X, Y) <- edge(X, Y). fact path(X, Y) <- edge(X, Z), path(Z, Y).",
        "path(a, W)",
    ),
    (
        "fact append(nil, L, L). fact append(cons(H, T), L, cons(H, R)) <- append(T, L, R).
         fact rev(nil, nil). fact rev(cons(H, T), R) <- rev(T, RT), append(RT, cons(H, nil), R).",
        "rev(cons(a, cons(b, cons(c, nil))), R)",
    ),
    ("fact eq(X, X).", "eq(Y, f(Y))"),
    ("fact p <- q. fact r.", "p"),
    ("fact len(nil, z). fact len(cons(H, T), s(N)) <- len(T, N).", "len(L, s(s(z)))"),
    (
        "fact even(z). fact even(s(X)) <- odd(X). fact odd(s(X)) <- even(X).",
        "even(s(s(s(s(z))))), odd(N)",
    ),
    (
        "fact parent(tom, bob). fact parent(bob, ann). fact parent(bob, pat). fact parent(pat, jim).",
        "parent(X, Y), parent(Y, Z)",
    ),
    (
        "fact last(cons(X, nil), X). fact last(cons(H, T), X) <- last(T, X).",
        "last(cons(a, cons(b, nil)), L)",
    ),
    (
        "fact select(X, cons(X, T), T). fact select(X, cons(H, T), cons(H, R)) <- select(X, T, R).
         fact perm(nil, nil). fact perm(L, cons(H, T)) <- select(H, L, R), perm(R, T).",
        "perm(cons(a, cons(b, cons(c, nil))), P)",
    ),
    (
        "fact q0. fact q1 <- q0. fact q2 <- q1. fact q3 <- q2. fact q4 <- q3. fact q5 <- q4. fact q6 <- q5.
         fact q7 <- q6. fact q8 <- q7. fact q9 <- q8. fact q10 <- q9. fact q11 <- q10. fact q12 <- q11.
         fact q13 <- q12. fact q14 <- q13. fact q15 <- q14. fact q16 <- q15. fact q17 <- q16. fact q18 <- q17.",
        "q18",
    ),
    (
        "fact parent(tom, ann). fact parent(tom, bob). fact parent(eve, ann).
         fact sibling(X, Y) <- parent(P, X), parent(P, Y).",
        "sibling(ann, S)",
    ),
    (
        "fact in(X, node(L, X, R)). fact in(X, node(L, Y, R)) <- in(X, L). fact in(X, node(L, Y, R)) <- in(X, R).",
        "in(V, node(node(leaf, a, leaf), b, node(leaf, c, leaf)))",
    ),
    ("fact same(X, X, yes). fact same(X, Y, maybe).", "same(a, B, C)"),
    (
        "fact double(z, z). fact double(s(X), s(s(Y))) <- double(X, Y).",
        "double(s(s(z)), D)",
    ),
];
