//! Abstract syntax for surface and core NILE expressions.
//!
//! Surface trees ([`Expr`]) keep every sugared construct exactly as written so
//! that rendering and tree diffs stay faithful to the author's phrasing.
//! [`expand_sugar`] lowers them to [`CoreExpr`], which only knows atoms,
//! negation, disjunction, concatenation, `REP`, `HAS` and the quantifiers.

mod desugar;
mod expr;
mod pred;
mod term;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use desugar::{desugar, expand_sugar, fresh_name};
pub use expr::{CoreExpr, Expr, Interpretation, Rel};
pub use pred::{gcd, lcm, NumPredicate, Pred};
pub use term::LinTerm;
pub use validate::{validate, Diagnostic, ExprPath};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("alphabet must not be empty")]
    EmptyAlphabet,
    #[error("alphabet symbol {0:?} is not an ASCII letter")]
    BadSymbol(char),
    #[error("duplicate alphabet symbol {0:?}")]
    DuplicateSymbol(char),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
}

/// Ordered set of single-character symbols. The declaration order is also
/// the lexicographic order used for counterexamples.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = char>>(symbols: I) -> Result<Self, SyntaxError> {
        let mut out: Vec<u8> = Vec::new();
        for c in symbols {
            if !c.is_ascii_alphabetic() {
                return Err(SyntaxError::BadSymbol(c));
            }
            if out.contains(&(c as u8)) {
                return Err(SyntaxError::DuplicateSymbol(c));
            }
            out.push(c as u8);
        }
        if out.is_empty() {
            return Err(SyntaxError::EmptyAlphabet);
        }
        Ok(Alphabet { symbols: out })
    }

    /// Parses `"a,b,c"` (whitespace tolerant); `"abc"` is accepted too.
    pub fn parse_list(text: &str) -> Result<Self, SyntaxError> {
        Self::new(text.chars().filter(|c| !c.is_whitespace() && *c != ',' && *c != '{' && *c != '}'))
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn chars(&self) -> impl Iterator<Item = char> + '_ {
        self.symbols.iter().map(|&b| b as char)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, sym: u8) -> Option<usize> {
        self.symbols.iter().position(|&s| s == sym)
    }

    pub fn contains(&self, c: char) -> bool {
        c.is_ascii() && self.symbols.contains(&(c as u8))
    }

    pub fn accepts_word(&self, w: &str) -> bool {
        w.chars().all(|c| self.contains(c))
    }

    /// All words of exactly `len` symbols, in lexicographic (declaration) order.
    pub fn words_of_len(&self, len: usize) -> Vec<String> {
        let k = self.symbols.len();
        let total = k.checked_pow(len as u32).expect("word enumeration overflow");
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0usize; len];
        for _ in 0..total {
            out.push(digits.iter().map(|&d| self.symbols[d] as char).collect());
            for pos in (0..len).rev() {
                digits[pos] += 1;
                if digits[pos] < k {
                    break;
                }
                digits[pos] = 0;
            }
        }
        out
    }

    /// All words up to `max_len`, shortest first.
    pub fn words_up_to(&self, max_len: usize) -> Vec<String> {
        (0..=max_len).flat_map(|l| self.words_of_len(l)).collect()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = SyntaxError;

    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        let mut chars = Vec::new();
        for s in v {
            let mut it = s.chars();
            match (it.next(), it.next()) {
                (Some(c), None) => chars.push(c),
                (Some(c), Some(_)) => return Err(SyntaxError::BadSymbol(c)),
                (None, _) => return Err(SyntaxError::EmptyAlphabet),
            }
        }
        Alphabet::new(chars)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.chars().map(String::from).collect()
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.chars().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// Free variables of a core expression: `(number vars, string vars)`.
pub fn free_vars(e: &CoreExpr) -> (std::collections::BTreeSet<String>, std::collections::BTreeSet<String>) {
    e.free_vars()
}
