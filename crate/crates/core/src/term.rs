//! First-order terms and atoms.
//!
//! Symbols are reference-counted strings so that clause renaming and state
//! cloning during search stay cheap. Variables carry a generation id: id `0`
//! is the variable as written in the source, any other id comes from
//! renaming a clause apart.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub type Symbol = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: Symbol,
    pub id: u32,
}

impl Var {
    pub fn new(name: &str) -> Self {
        Var { name: name.into(), id: 0 }
    }

    pub fn renamed(&self, id: u32) -> Self {
        Var { name: self.name.clone(), id }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.id == 0 {
            write!(f, "{}", self.name)
        } else {
            write!(f, "_G{}_{}", self.id, self.name)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    Const(Symbol),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn constant(name: &str) -> Self {
        Term::Const(name.into())
    }

    pub fn app(functor: &str, args: Vec<Term>) -> Self {
        if args.is_empty() {
            Term::Const(functor.into())
        } else {
            Term::App(functor.into(), args)
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Replaces every variable with its renamed copy at generation `id`.
    pub fn rename(&self, id: u32) -> Term {
        match self {
            Term::Var(v) => Term::Var(v.renamed(id)),
            Term::Const(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.rename(id)).collect()),
        }
    }

    fn match_into(&self, ground: &Term, bindings: &mut HashMap<Var, Term>) -> bool {
        match (self, ground) {
            (Term::Var(v), _) => match bindings.get(v) {
                Some(bound) => bound == ground,
                None => {
                    bindings.insert(v.clone(), ground.clone());
                    true
                }
            },
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| x.match_into(y, bindings))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "{c}"),
            Term::App(fun, args) => {
                write!(f, "{fun}(")?;
                write_args(f, args)?;
                write!(f, ")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// A predicate applied to argument terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub pred: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: &str, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    pub fn prop(pred: &str) -> Self {
        Atom::new(pred, Vec::new())
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn key(&self) -> (Symbol, usize) {
        (self.pred.clone(), self.args.len())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn rename(&self, id: u32) -> Atom {
        Atom { pred: self.pred.clone(), args: self.args.iter().map(|a| a.rename(id)).collect() }
    }

    /// One-way matching: true when `self` (ground) is an instance of `pattern`.
    pub fn instance_of(&self, pattern: &Atom) -> bool {
        if self.pred != pattern.pred || self.args.len() != pattern.args.len() {
            return false;
        }
        let mut bindings = HashMap::new();
        pattern.args.iter().zip(&self.args).all(|(p, g)| p.match_into(g, &mut bindings))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pred)?;
        if !self.args.is_empty() {
            write!(f, "(")?;
            write_args(f, &self.args)?;
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// Formats a set of atoms as `{a, b(c)}`.
pub fn format_atom_set<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    let parts: Vec<String> = atoms.into_iter().map(|a| a.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}
