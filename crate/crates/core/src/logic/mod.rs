//! Unification, SLD resolution and bounded refutation.

mod prove;
mod resolve;
mod subst;

pub use prove::{prove, refutes, ProofOutcome, Refutation};
pub use resolve::{resolve_step, Alternative, ResolveError, VarGen};
pub use subst::{apply_subst, unify, unify_atoms, Substitution};
