//! The eleven bundled exercise languages and their self-check.
//!
//! Entries live in `data/corpus.json` in the expression syntax, so loading the
//! corpus also exercises the parser. R1–R6 come with a regular expression and
//! are checked exactly against it; C1–C5 are checked word by word against a
//! direct implementation of their set definitions.

use std::sync::OnceLock;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::automata::{
    compile_dfa, determinize, eliminate_positions, minimize, parse_regex, shortest_in_sym_diff, DEFAULT_STATE_BUDGET,
};
use crate::equivalence::Method;
use crate::eval::Evaluator;
use crate::parser::parse;
use crate::syntax::{expand_sugar, validate, Alphabet, CoreExpr, Expr};

const CORPUS_JSON: &str = include_str!("../data/corpus.json");

/// How the exercise was presented to students.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Set,
    RE,
    NFA,
    DFA,
    CFG,
    PDA,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusEntry {
    pub id: String,
    pub alphabet: Vec<String>,
    pub nile_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regex_text: Option<String>,
    pub format: Format,
    pub english_description: String,
    /// Kept for the original exercise sheets; not used by any logic.
    pub german_description: String,
}

impl CorpusEntry {
    pub fn sigma(&self) -> Alphabet {
        Alphabet::parse_list(&self.alphabet.join(",")).expect("corpus alphabets are valid")
    }

    pub fn expr(&self) -> Expr {
        parse(&self.nile_text).expect("corpus expressions parse")
    }

    pub fn core(&self) -> CoreExpr {
        expand_sugar(&self.expr(), &self.sigma()).expect("corpus expressions desugar")
    }
}

/// All entries, in the order R1–R6, C1–C5.
pub fn corpus_entries() -> &'static [CorpusEntry] {
    static ENTRIES: OnceLock<Vec<CorpusEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| serde_json::from_str(CORPUS_JSON).expect("bundled corpus is valid JSON"))
}

pub fn corpus_entry(id: &str) -> Option<&'static CorpusEntry> {
    corpus_entries().iter().find(|e| e.id == id)
}

fn count(w: &str, c: char) -> usize {
    w.chars().filter(|&x| x == c).count()
}

/// Membership in the set definition of a context-free entry, by brute force.
pub fn oracle(id: &str, w: &str) -> Option<bool> {
    let n = w.len();
    Some(match id {
        "C1" => count(w, 'b') >= count(w, 'a'),
        "C2" => n % 2 == 0 && *w == format!("{}{}", "a".repeat(n / 2), "b".repeat(n / 2)),
        "C3" => (0..=n)
            .any(|m| (0..=n - m).any(|k| *w == format!("{}{}{}", "a".repeat(m), "b".repeat(k), "ab".repeat(m + k)))),
        "C4" => w.char_indices().any(|(p, c)| {
            let (prefix, suffix) = (&w[..p], &w[p + 1..]);
            c == 'b' && suffix.chars().all(|x| x == 'a') && count(prefix, 'a') == suffix.len()
        }),
        "C5" => count(w, 'a') <= 2 * count(w, 'b'),
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub id: String,
    pub ok: bool,
    /// `automata` for R1–R6; absent for the word-by-word checks.
    pub method: Option<Method>,
    pub words_checked: usize,
    pub failures: Vec<String>,
    pub millis: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelfCheckReport {
    pub ok: bool,
    pub entries: Vec<EntryCheck>,
}

/// Longest words compared against the oracles.
pub fn oracle_bound(sigma: &Alphabet) -> usize {
    if sigma.len() >= 3 {
        8
    } else {
        10
    }
}

fn check_regular(entry: &CorpusEntry, regex: &str) -> Result<(), String> {
    let sigma = entry.sigma();
    let core = eliminate_positions(&entry.core(), &sigma);
    let nile = compile_dfa(&core, &sigma, DEFAULT_STATE_BUDGET).map_err(|e| e.to_string())?;
    let nfa = parse_regex(regex, &sigma).map_err(|e| e.to_string())?;
    let re = minimize(&determinize(&nfa, DEFAULT_STATE_BUDGET).map_err(|e| e.to_string())?);
    match shortest_in_sym_diff(&nile, &re) {
        None => Ok(()),
        Some(w) => Err(format!("differs from `{regex}` on {w:?}")),
    }
}

fn check_entry(entry: &CorpusEntry) -> EntryCheck {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut words_checked = 0;
    let mut method = None;
    let sigma = entry.sigma();
    match parse(&entry.nile_text) {
        Err(e) => failures.push(format!("parse error: {e}")),
        Ok(expr) => {
            if let Err(diags) = validate(&expr, &sigma) {
                failures.extend(diags.iter().map(|d| d.to_string()));
            }
            if failures.is_empty() {
                if let Some(re) = &entry.regex_text {
                    method = Some(Method::Automata);
                    if let Err(e) = check_regular(entry, re) {
                        failures.push(e);
                    }
                } else {
                    let core = entry.core();
                    let ev = Evaluator::new(&core, &sigma);
                    for w in sigma.words_up_to(oracle_bound(&sigma)) {
                        words_checked += 1;
                        let expected = oracle(&entry.id, &w);
                        match ev.accepts(&w) {
                            Ok(got) if Some(got) == expected => {}
                            Ok(got) => failures.push(format!("{w:?}: eval {got}, oracle {expected:?}")),
                            Err(e) => failures.push(format!("{w:?}: {e}")),
                        }
                        if failures.len() >= 10 {
                            break;
                        }
                    }
                }
            }
        }
    }
    EntryCheck {
        id: entry.id.clone(),
        ok: failures.is_empty(),
        method,
        words_checked,
        failures,
        millis: start.elapsed().as_millis(),
    }
}

/// Checks every entry; failures are reported, never raised.
pub fn corpus_selfcheck() -> SelfCheckReport {
    let entries: Vec<EntryCheck> = corpus_entries().iter().map(check_entry).collect();
    SelfCheckReport { ok: entries.iter().all(|e| e.ok), entries }
}
