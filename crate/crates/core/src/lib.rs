//! NILE: a compositional expression language for formal languages.
//!
//! The crate covers the full toolchain: concrete syntax ([`parser`]),
//! membership ([`eval`]), compilation to finite automata ([`automata`]),
//! Presburger arithmetic ([`presburger`]), language equivalence
//! ([`equivalence`]), tree-diff explanations ([`explain`]) and the bundled
//! exercise corpus ([`corpus`]).

pub mod automata;
pub mod corpus;
pub mod equivalence;
pub mod eval;
pub mod explain;
pub mod parser;
pub mod presburger;
pub mod syntax;

pub use syntax::{Alphabet, CoreExpr, Expr, Interpretation, LinTerm, NumPredicate, Pred};
