use std::collections::HashMap;

use crate::term::{Atom, Term, Var};

/// Variable bindings in triangular form: a bound variable may map to a term
/// that mentions other bound variables. [`Substitution::apply`] resolves
/// chains fully, so applying a substitution is idempotent.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Substitution {
    bindings: HashMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.bindings.get(v)
    }

    /// Binds `v` to `t` without any check. Used to build substitutions by hand.
    pub fn bind(&mut self, v: Var, t: Term) {
        self.bindings.insert(v, t);
    }

    fn walk<'a>(&'a self, mut t: &'a Term) -> &'a Term {
        while let Term::Var(v) = t {
            match self.bindings.get(v) {
                Some(next) => t = next,
                None => break,
            }
        }
        t
    }

    pub fn apply(&self, t: &Term) -> Term {
        match self.walk(t) {
            Term::Var(v) => Term::Var(v.clone()),
            Term::Const(c) => Term::Const(c.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.apply(a)).collect()),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| self.apply(t)).collect() }
    }

    fn occurs(&self, v: &Var, t: &Term) -> bool {
        match self.walk(t) {
            Term::Var(w) => w == v,
            Term::Const(_) => false,
            Term::App(_, args) => args.iter().any(|a| self.occurs(v, a)),
        }
    }

    fn unify_in_place(&mut self, a: &Term, b: &Term) -> bool {
        let a = self.walk(a).clone();
        let b = self.walk(b).clone();
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => true,
            (Term::Var(x), _) => {
                if self.occurs(x, &b) {
                    return false;
                }
                self.bindings.insert(x.clone(), b);
                true
            }
            (_, Term::Var(y)) => {
                if self.occurs(y, &a) {
                    return false;
                }
                self.bindings.insert(y.clone(), a);
                true
            }
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.unify_in_place(x, y))
            }
            _ => false,
        }
    }
}

/// Most general unifier of two terms extending `s`, with occurs check.
pub fn unify(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let mut out = s.clone();
    out.unify_in_place(a, b).then_some(out)
}

pub fn unify_atoms(a: &Atom, b: &Atom, s: &Substitution) -> Option<Substitution> {
    if a.pred != b.pred || a.args.len() != b.args.len() {
        return None;
    }
    let mut out = s.clone();
    a.args.iter().zip(&b.args).all(|(x, y)| out.unify_in_place(x, y)).then_some(out)
}

pub fn apply_subst(t: &Term, s: &Substitution) -> Term {
    s.apply(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(args: Vec<Term>) -> Term {
        Term::app("f", args)
    }

    #[test]
    fn textbook_mgu() {
        let s = unify(&f(vec![Term::var("X"), Term::constant("a")]), &f(vec![Term::constant("b"), Term::var("Y")]), &Substitution::new())
            .unwrap();
        assert_eq!(s.apply(&Term::var("X")), Term::constant("b"));
        assert_eq!(s.apply(&Term::var("Y")), Term::constant("a"));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn occurs_check_fails() {
        assert!(unify(&Term::var("X"), &f(vec![Term::var("X")]), &Substitution::new()).is_none());
    }

    #[test]
    fn distinct_constants_fail() {
        assert!(unify(&Term::constant("a"), &Term::constant("b"), &Substitution::new()).is_none());
    }

    #[test]
    fn apply_examples() {
        let mut s = Substitution::new();
        s.bind(Var::new("X"), Term::constant("a"));
        assert_eq!(apply_subst(&f(vec![Term::var("X")]), &s), f(vec![Term::constant("a")]));
        assert_eq!(apply_subst(&Term::constant("g"), &Substitution::new()), Term::constant("g"));
        let mut s = Substitution::new();
        s.bind(Var::new("X"), Term::var("Y"));
        assert_eq!(apply_subst(&f(vec![Term::var("X"), Term::var("Y")]), &s), f(vec![Term::var("Y"), Term::var("Y")]));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["X", "Y", "Z"]).prop_map(Term::var),
            prop::sample::select(vec!["a", "b"]).prop_map(Term::constant),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            (prop::sample::select(vec!["f", "g"]), prop::collection::vec(inner, 1..=2))
                .prop_map(|(fun, args)| Term::App(fun.into(), args))
        })
    }

    proptest! {
        #[test]
        fn apply_is_idempotent(a in arb_term(), b in arb_term()) {
            if let Some(s) = unify(&a, &b, &Substitution::new()) {
                let once = s.apply(&a);
                prop_assert_eq!(s.apply(&once), once.clone());
                prop_assert_eq!(once, s.apply(&b));
            }
        }

        // Any unifier of a and b factors through the mgu: applying it to the
        // mgu's image of each variable gives the same term as applying it directly.
        #[test]
        fn unifier_is_most_general(a in arb_term(), b in arb_term(), ground in prop::collection::vec(prop::sample::select(vec!["a", "b"]), 3)) {
            let vars = ["X", "Y", "Z"];
            // A candidate ground unifier: bind every variable to a constant.
            let mut theta = Substitution::new();
            for (v, c) in vars.iter().zip(&ground) {
                theta.bind(Var::new(v), Term::constant(c));
            }
            let theta_unifies = theta.apply(&a) == theta.apply(&b);
            match unify(&a, &b, &Substitution::new()) {
                None => prop_assert!(!theta_unifies),
                Some(mgu) => {
                    if theta_unifies {
                        for v in vars {
                            let x = Term::var(v);
                            prop_assert_eq!(theta.apply(&mgu.apply(&x)), theta.apply(&x));
                        }
                    }
                }
            }
        }
    }
}
