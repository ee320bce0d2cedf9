//! Structural explanations for a wrong candidate expression.
//!
//! The candidate and reference are turned into labeled trees and diffed with
//! an optimal ordered tree edit script. Local patterns in the script map to
//! finding codes with short English messages. Surface trees are used (not the
//! desugared core) so that `BEGIN`, `END` and `ALPH` remain visible.

pub mod ted;

use serde::Serialize;
use thiserror::Error;

use crate::equivalence::{equiv, EquivError, EquivOptions, Status, Verdict};
use crate::syntax::{expand_sugar, Alphabet, CoreExpr, Expr, ExprPath, LinTerm, Pred, SyntaxError};

pub use ted::{apply, tree_diff, tree_distance, EditOp, EditScript, Label, TedError, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FindingCode {
    RepWrapperMissing,
    PredicateMismatch,
    AnchorConfusion,
    QuantifierMissing,
    AlphabetMismatch,
    GenericStructure,
}

impl FindingCode {
    pub fn as_str(self) -> &'static str {
        match self {
            FindingCode::RepWrapperMissing => "REP_WRAPPER_MISSING",
            FindingCode::PredicateMismatch => "PREDICATE_MISMATCH",
            FindingCode::AnchorConfusion => "ANCHOR_CONFUSION",
            FindingCode::QuantifierMissing => "QUANTIFIER_MISSING",
            FindingCode::AlphabetMismatch => "ALPHABET_MISMATCH",
            FindingCode::GenericStructure => "GENERIC_STRUCTURE",
        }
    }
}

/// Which expression a finding's path points into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Candidate,
    Reference,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: FindingCode,
    pub side: Side,
    /// Child indices from the root of the expression named by `side`.
    pub path: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExplainCounterexample {
    pub word: String,
    pub in_reference: bool,
    pub in_candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExplainReport {
    pub verdict: Verdict,
    pub counterexample: Option<ExplainCounterexample>,
    pub findings: Vec<Finding>,
    /// Edit script from the candidate tree to the reference tree.
    pub script: Option<EditScript>,
}

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

fn pred_arg(p: &Option<Pred>, default: i64) -> Option<String> {
    Some(match p {
        Some(p) => p.to_string(),
        None => Pred::Ge(LinTerm::constant(default)).to_string(),
    })
}

fn count_side(coeff: u32) -> String {
    if coeff == 1 {
        "COUNT".into()
    } else {
        format!("{coeff}*COUNT")
    }
}

/// Labeled tree of a surface expression; children follow [`Expr::children`].
pub fn surface_tree(e: &Expr) -> Tree {
    let label = match e {
        Expr::Atom(w) if w.is_empty() => Label::new("ATOM", Some("eps".into())),
        Expr::Atom(w) => Label::new("ATOM", Some(w.clone())),
        Expr::Top => Label::bare("TOP"),
        Expr::Bot => Label::bare("BOT"),
        Expr::Not(_) => Label::bare("NOT"),
        Expr::And(..) => Label::bare("AND"),
        Expr::Or(..) => Label::bare("OR"),
        Expr::Implies(..) => Label::bare("IMPLIES"),
        Expr::Iff(..) => Label::bare("IFF"),
        Expr::Concat(..) => Label::bare("CONCAT"),
        Expr::Rep(p, _) => Label::new("REP", pred_arg(p, 0)),
        Expr::Has(p, _) => Label::new("HAS", pred_arg(p, 1)),
        Expr::Begin(p, _) => Label::new("BEGIN", pred_arg(p, 1)),
        Expr::End(p, _) => Label::new("END", pred_arg(p, 1)),
        Expr::Len(p) => Label::new("LEN", Some(p.to_string())),
        Expr::Alph(syms, _) => {
            let s: Vec<String> = syms.iter().map(char::to_string).collect();
            Label::new("ALPH", Some(s.join(",")))
        }
        Expr::Alternate(..) => Label::bare("ALTERNATE"),
        Expr::Cons(items) => {
            let ps: Vec<String> = items.iter().map(|(p, _)| p.to_string()).collect();
            Label::new("CONS", Some(ps.join("; ")))
        }
        Expr::Range(i, j, _) => Label::new("RANGE", Some(format!("{i}, {j}"))),
        Expr::At(i, _) => Label::new("AT", Some(i.to_string())),
        Expr::CountCmp { lhs_coeff, rel, rhs_coeff, .. } => Label::new(
            "COUNT_CMP",
            Some(format!("{} {} {}", count_side(*lhs_coeff), rel.symbol(), count_side(*rhs_coeff))),
        ),
        Expr::ExistsNum(v, _) => Label::new("EXISTS", Some(v.clone())),
        Expr::ForallNum(v, _) => Label::new("FORALL", Some(v.clone())),
        Expr::ExistsStr(v, _) => Label::new("EXISTSSTR", Some(v.clone())),
        Expr::StrVar(v) => Label::new("VAR", Some(v.clone())),
        Expr::Reverse(_) => Label::bare("REVERSE"),
        Expr::Palindrome => Label::bare("PALINDROME"),
    };
    Tree::node(label, e.children().into_iter().map(surface_tree).collect())
}

/// Labeled tree of a core expression; children follow [`CoreExpr::children`].
pub fn core_tree(e: &CoreExpr) -> Tree {
    let label = match e {
        CoreExpr::Atom(w) if w.is_empty() => Label::new("ATOM", Some("eps".into())),
        CoreExpr::Atom(w) => Label::new("ATOM", Some(w.clone())),
        CoreExpr::Not(_) => Label::bare("NOT"),
        CoreExpr::Or(..) => Label::bare("OR"),
        CoreExpr::Concat(..) => Label::bare("CONCAT"),
        CoreExpr::Rep(p, _) => Label::new("REP", Some(p.to_string())),
        CoreExpr::Has(p, _) => Label::new("HAS", Some(p.to_string())),
        CoreExpr::ExistsNum(v, _) => Label::new("EXISTS", Some(v.clone())),
        CoreExpr::ExistsStr(v, _) => Label::new("EXISTSSTR", Some(v.clone())),
        CoreExpr::StrVar(v) => Label::new("VAR", Some(v.clone())),
        CoreExpr::Reverse(_) => Label::bare("REVERSE"),
    };
    Tree::node(label, e.children().into_iter().map(core_tree).collect())
}

/// Edit script turning core expression `a` into `b`.
pub fn diff_core(a: &CoreExpr, b: &CoreExpr) -> Result<EditScript, TedError> {
    tree_diff(&core_tree(a), &core_tree(b))
}

/// Edit script turning surface expression `a` into `b`.
pub fn diff_surface(a: &Expr, b: &Expr) -> Result<EditScript, TedError> {
    tree_diff(&surface_tree(a), &surface_tree(b))
}

/// Decides equivalence and explains the difference, if any.
pub fn explain(
    reference: &Expr,
    candidate: &Expr,
    sigma: &Alphabet,
    opts: &EquivOptions,
) -> Result<ExplainReport, ExplainError> {
    let (r, c) = (expand_sugar(reference, sigma)?, expand_sugar(candidate, sigma)?);
    let verdict = equiv(&r, &c, sigma, opts)?;
    Ok(explain_verdict(reference, candidate, verdict))
}

/// Builds a report for an already computed verdict (reference first).
pub fn explain_verdict(reference: &Expr, candidate: &Expr, verdict: Verdict) -> ExplainReport {
    let counterexample = verdict.counterexample.as_ref().map(|c| ExplainCounterexample {
        word: c.word.clone(),
        in_reference: c.in_first,
        in_candidate: c.in_second,
    });
    if verdict.status == Status::Equivalent {
        return ExplainReport { verdict, counterexample, findings: Vec::new(), script: None };
    }
    let (findings, script) = findings(candidate, reference);
    ExplainReport { verdict, counterexample, findings, script }
}

const PRED_KINDS: &[&str] = &["REP", "HAS", "BEGIN", "END", "LEN", "CONS", "RANGE", "AT", "COUNT_CMP"];
const QUANTIFIERS: &[&str] = &["EXISTS", "FORALL", "EXISTSSTR"];

fn is(l: &Label, kinds: &[&str]) -> bool {
    kinds.contains(&l.kind.as_str())
}

fn snippet(e: &Expr, path: &[usize]) -> String {
    let text = ExprPath(path.to_vec()).resolve(e).map(|s| s.to_string()).unwrap_or_default();
    if text.chars().count() > 60 {
        let cut: String = text.chars().take(57).collect();
        format!("{cut}...")
    } else {
        text
    }
}

fn common_prefix(paths: &[&Vec<usize>]) -> Vec<usize> {
    let Some(first) = paths.first() else { return Vec::new() };
    let mut n = first.len();
    for p in &paths[1..] {
        n = n.min(p.iter().zip(first.iter()).take_while(|(a, b)| a == b).count());
    }
    first[..n].to_vec()
}

/// Findings for a candidate that differs from the reference, plus the
/// underlying edit script (absent when the trees are too large to diff).
pub fn findings(candidate: &Expr, reference: &Expr) -> (Vec<Finding>, Option<EditScript>) {
    let (tc, tr) = (surface_tree(candidate), surface_tree(reference));
    let Ok((script, origins)) = ted::diff_with_origins(&tc, &tr, ted::DEFAULT_PAIR_BUDGET) else {
        let f = Finding {
            code: FindingCode::GenericStructure,
            side: Side::Candidate,
            path: Vec::new(),
            message: "The expressions are too large to compare structurally.".into(),
        };
        return (vec![f], None);
    };
    let ops = &script.ops;
    let mut used = vec![false; ops.len()];
    let mut out = Vec::new();
    let src = |k: usize| origins[k].source.clone().unwrap_or_default();
    let tgt = |k: usize| origins[k].target.clone().unwrap_or_default();

    // Alphabet declarations.
    for (k, op) in ops.iter().enumerate() {
        let (side, path, from, to) = match op {
            EditOp::Relabel { from, to, .. } if from.kind == "ALPH" && to.kind == "ALPH" => {
                (Side::Candidate, src(k), from.arg.clone(), to.arg.clone())
            }
            EditOp::DeleteNode { .. } if tc.at(&src(k)).is_some_and(|t| t.label.kind == "ALPH") => {
                (Side::Candidate, src(k), tc.at(&src(k)).and_then(|t| t.label.arg.clone()), None)
            }
            EditOp::InsertNode { label, .. } if label.kind == "ALPH" => {
                (Side::Reference, tgt(k), None, label.arg.clone())
            }
            _ => continue,
        };
        used[k] = true;
        let declared = |a: Option<String>| a.map_or("no alphabet".to_string(), |s| format!("the alphabet {{{s}}}"));
        out.push(Finding {
            code: FindingCode::AlphabetMismatch,
            side,
            path,
            message: format!("The candidate declares {}, but the exercise is over {}.", declared(from), declared(to)),
        });
    }

    // Missing quantifiers.
    for (k, op) in ops.iter().enumerate() {
        let EditOp::InsertNode { label, .. } = op else { continue };
        if !is(label, QUANTIFIERS) {
            continue;
        }
        used[k] = true;
        let var = label.arg.clone().unwrap_or_default();
        let message = if label.kind == "EXISTS" {
            format!(
                "The candidate has no counterpart of `EXISTS {var}`. The reference uses `{var}` to tie \
                 together counts in different parts of the word: `{}`.",
                snippet(reference, &tgt(k))
            )
        } else {
            format!(
                "The candidate lacks the quantifier `{} {var}` used in `{}`.",
                label.kind,
                snippet(reference, &tgt(k))
            )
        };
        out.push(Finding { code: FindingCode::QuantifierMissing, side: Side::Reference, path: tgt(k), message });
    }

    // REP wrappers around an existing subtree.
    for (k, op) in ops.iter().enumerate() {
        let EditOp::InsertNode { label, adopt, .. } = op else { continue };
        if label.kind != "REP" || *adopt == 0 {
            continue;
        }
        used[k] = true;
        let path = tgt(k);
        // the count may have moved here from the enclosing node
        if let Some((_, parent)) = path.split_last() {
            for (j, other) in ops.iter().enumerate() {
                if let EditOp::Relabel { from, .. } = other {
                    if !used[j] && origins[j].target.as_deref() == Some(parent) && from.arg == label.arg {
                        used[j] = true;
                    }
                }
            }
        }
        let mut body = path.clone();
        body.push(0);
        out.push(Finding {
            code: FindingCode::RepWrapperMissing,
            side: Side::Reference,
            path: path.clone(),
            message: format!(
                "`{}` has to occur as a block of consecutive copies, `{}`. The candidate does not \
                 require the copies to be adjacent.",
                snippet(reference, &body),
                snippet(reference, &path)
            ),
        });
    }

    // Anchors used where a chain of blocks is meant, or the reverse.
    let anchor = |l: &Label| l.kind == "BEGIN" || l.kind == "END";
    let mut group = Vec::new();
    for (k, op) in ops.iter().enumerate() {
        if let EditOp::Relabel { from, to, .. } = op {
            if !used[k] && ((anchor(from) && to.kind == "REP") || (from.kind == "REP" && anchor(to))) {
                group.push(k);
            }
        }
    }
    if !group.is_empty() {
        let anchors_in_candidate =
            group.iter().any(|&k| matches!(&ops[k], EditOp::Relabel { from, .. } if anchor(from)));
        for (k, op) in ops.iter().enumerate() {
            if let EditOp::Relabel { from, to, .. } = op {
                let joins = [from.kind.as_str(), to.kind.as_str()];
                if !used[k] && (joins == ["AND", "CONCAT"] || joins == ["CONCAT", "AND"]) {
                    group.push(k);
                }
            }
        }
        let paths: Vec<Vec<usize>> = group.iter().map(|&k| src(k)).collect();
        let refs: Vec<&Vec<usize>> = paths.iter().collect();
        let cpath = common_prefix(&refs);
        let tpaths: Vec<Vec<usize>> = group.iter().map(|&k| tgt(k)).collect();
        let trefs: Vec<&Vec<usize>> = tpaths.iter().collect();
        let rpath = common_prefix(&trefs);
        for &k in &group {
            used[k] = true;
        }
        let message = if anchors_in_candidate {
            format!(
                "`BEGIN` and `END` only constrain a prefix and a suffix, which may overlap or leave a gap. \
                 The reference splits the whole word into consecutive blocks: `{}`.",
                snippet(reference, &rpath)
            )
        } else {
            format!(
                "The candidate splits the whole word into consecutive blocks, but the reference only \
                 constrains a prefix or a suffix: `{}`.",
                snippet(reference, &rpath)
            )
        };
        out.push(Finding { code: FindingCode::AnchorConfusion, side: Side::Candidate, path: cpath, message });
    }

    // Changed count conditions.
    for (k, op) in ops.iter().enumerate() {
        let EditOp::Relabel { from, to, .. } = op else { continue };
        if used[k] || from.kind != to.kind || !is(from, PRED_KINDS) {
            continue;
        }
        used[k] = true;
        let (f, t) = (from.arg.clone().unwrap_or_default(), to.arg.clone().unwrap_or_default());
        out.push(Finding {
            code: FindingCode::PredicateMismatch,
            side: Side::Candidate,
            path: src(k),
            message: format!("In `{}` the condition `{f}` should be `{t}`.", snippet(candidate, &src(k))),
        });
    }

    // Everything else.
    let rest: Vec<usize> = (0..ops.len()).filter(|&k| !used[k]).collect();
    if !rest.is_empty() {
        let on_candidate: Vec<&Vec<usize>> = rest.iter().filter_map(|&k| origins[k].source.as_ref()).collect();
        let (side, path) = if on_candidate.is_empty() {
            let on_ref: Vec<&Vec<usize>> = rest.iter().filter_map(|&k| origins[k].target.as_ref()).collect();
            (Side::Reference, common_prefix(&on_ref))
        } else {
            (Side::Candidate, common_prefix(&on_candidate))
        };
        let here = match side {
            Side::Candidate => snippet(candidate, &path),
            Side::Reference => snippet(reference, &path),
        };
        let n = rest.len();
        out.push(Finding {
            code: FindingCode::GenericStructure,
            side,
            path,
            message: format!(
                "The structure around `{here}` differs from the reference; {n} {} needed.",
                if n == 1 { "edit is" } else { "edits are" }
            ),
        });
    }
    (out, Some(script))
}
