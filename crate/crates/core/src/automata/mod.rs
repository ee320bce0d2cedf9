//! Finite automata for the regular fragment: compilation, the Boolean
//! algebra needed for exact equivalence, shortest counterexamples and a small
//! regular-expression front end.

mod compile;
mod counter;
mod dfa;
mod nfa;
mod positions;
mod regex;

use thiserror::Error;

pub use compile::{compile_dfa, compile_regular};
pub use counter::CounterSpec;
pub use dfa::{determinize, minimize, product, shortest_in_sym_diff, Dfa, ProductMode};
pub use nfa::{reverse, Nfa};
pub use positions::eliminate_positions;
pub use regex::{parse_regex, RegexError};

/// Default cap on the number of states produced by a single construction.
pub const DEFAULT_STATE_BUDGET: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("automaton exceeded the state budget of {limit}")]
    BudgetExceeded { limit: usize },
    #[error("expression is not in the regular fragment: {0}")]
    NotRegular(String),
    #[error("automata over different alphabets")]
    AlphabetMismatch,
}
