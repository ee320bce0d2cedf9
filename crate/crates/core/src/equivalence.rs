//! Language equivalence of closed expressions.
//!
//! Quantifier-free expressions (after position-quantifier elimination) are
//! compared exactly through minimal DFAs. Expressions in block form, an
//! existential prefix over unions of chains `REP(P1, w1) . ... . REP(Pm, wm)`,
//! are compared exactly by deciding equality of their exponent sets in
//! Presburger arithmetic. Everything else is tested on all words up to a
//! length bound, and the verdict says so.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{compile_dfa, eliminate_positions, shortest_in_sym_diff, AutomataError, DEFAULT_STATE_BUDGET};
use crate::eval::{EvalError, Evaluator};
use crate::presburger::{decide_with_budget, eliminate_with_budget, PresburgerError, PresburgerFormula as F};
use crate::syntax::{fresh_name, Alphabet, CoreExpr, LinTerm, NumPredicate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("expression is not closed")]
    NotClosed,
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Class {
    Regular,
    Block,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Equivalent,
    Different,
    /// No difference among the words of length at most the bound.
    BoundedEquivalent(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Automata,
    BlockPresburger,
    Bounded,
}

/// Why an exact method was not used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    /// Neither expression pair fits a decidable fragment.
    Undecidable,
    AutomatonBudget,
    PresburgerBudget,
    /// Block skeletons that cannot be aligned.
    SkeletonMismatch,
    /// Exponent sets differ but the skeleton does not determine exponents.
    AmbiguousSkeleton,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub word: String,
    pub in_first: bool,
    pub in_second: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub method: Method,
    pub counterexample: Option<Counterexample>,
    pub fallback: Option<Fallback>,
}

#[derive(Clone, Debug)]
pub struct EquivOptions {
    /// Length bound for bounded testing; see [`default_bound`].
    pub bound_len: Option<usize>,
    pub state_budget: usize,
    pub formula_budget: usize,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions { bound_len: None, state_budget: DEFAULT_STATE_BUDGET, formula_budget: 200_000 }
    }
}

/// 12 for two symbols, 9 for three, otherwise the largest length whose
/// word count stays around 2^14.
pub fn default_bound(sigma: &Alphabet) -> usize {
    match sigma.len() {
        1 => 64,
        2 => 12,
        3 => 9,
        k => {
            let mut l = 1;
            while (k as u64).pow(l as u32 + 1) <= 16_384 {
                l += 1;
            }
            l
        }
    }
}

/// One factor `REP(count, word)` of a chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub word: String,
    pub count: NumPredicate,
}

/// `EXISTS vars [chain_1 | ... | chain_k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockForm {
    pub vars: Vec<String>,
    pub chains: Vec<Vec<Block>>,
}

const MAX_CHAINS: usize = 64;

pub fn classify(e: &CoreExpr, sigma: &Alphabet) -> Class {
    if !eliminate_positions(e, sigma).has_quantifier() {
        Class::Regular
    } else if normalize_block(e).is_some() {
        Class::Block
    } else {
        Class::General
    }
}

/// Recognizes block form. Plain atoms count as `REP(=1, w)`, and an
/// enclosing `ALPH` restriction is dropped when it admits every chain word.
pub fn normalize_block(e: &CoreExpr) -> Option<BlockForm> {
    let mut used = BTreeSet::new();
    collect_names(e, &mut used);
    let mut taken = BTreeSet::new();
    let chains = chains_of(e, &mut taken, &mut used)?;
    let mut vars: Vec<String> = Vec::new();
    for (vs, blocks) in &chains {
        for b in blocks {
            if b.count.vars().iter().any(|v| !vs.contains(v)) {
                return None;
            }
        }
        for v in vs {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
    }
    Some(BlockForm { vars, chains: chains.into_iter().map(|(_, b)| b).collect() })
}

fn collect_names(e: &CoreExpr, out: &mut BTreeSet<String>) {
    match e {
        CoreExpr::ExistsNum(v, _) | CoreExpr::ExistsStr(v, _) | CoreExpr::StrVar(v) => {
            out.insert(v.clone());
        }
        CoreExpr::Rep(p, _) | CoreExpr::Has(p, _) => out.extend(p.vars()),
        _ => {}
    }
    for c in e.children() {
        collect_names(c, out);
    }
}

fn rename_num(e: &CoreExpr, from: &str, to: &str) -> CoreExpr {
    match e {
        CoreExpr::Rep(p, a) => CoreExpr::rep(p.rename(from, to), rename_num(a, from, to)),
        CoreExpr::Has(p, a) => CoreExpr::has(p.rename(from, to), rename_num(a, from, to)),
        CoreExpr::ExistsNum(v, _) if v == from => e.clone(),
        CoreExpr::ExistsNum(v, a) => CoreExpr::exists(v.clone(), rename_num(a, from, to)),
        CoreExpr::ExistsStr(v, a) => CoreExpr::ExistsStr(v.clone(), Box::new(rename_num(a, from, to))),
        CoreExpr::Not(a) => CoreExpr::not(rename_num(a, from, to)),
        CoreExpr::Reverse(a) => CoreExpr::Reverse(Box::new(rename_num(a, from, to))),
        CoreExpr::Or(a, b) => CoreExpr::or(rename_num(a, from, to), rename_num(b, from, to)),
        CoreExpr::Concat(a, b) => CoreExpr::concat(rename_num(a, from, to), rename_num(b, from, to)),
        CoreExpr::Atom(_) | CoreExpr::StrVar(_) => e.clone(),
    }
}

type Chain = (Vec<String>, Vec<Block>);

fn chains_of(e: &CoreExpr, taken: &mut BTreeSet<String>, used: &mut BTreeSet<String>) -> Option<Vec<Chain>> {
    match e {
        CoreExpr::Atom(w) if w.is_empty() => Some(vec![(vec![], vec![])]),
        CoreExpr::Atom(w) => Some(vec![(vec![], vec![Block { word: w.clone(), count: one() }])]),
        CoreExpr::Rep(p, a) => match a.as_ref() {
            CoreExpr::Atom(w) if !w.is_empty() => {
                Some(vec![(vec![], vec![Block { word: w.clone(), count: p.clone() }])])
            }
            _ => None,
        },
        CoreExpr::Concat(a, b) => {
            let (l, r) = (chains_of(a, taken, used)?, chains_of(b, taken, used)?);
            if l.len() * r.len() > MAX_CHAINS {
                return None;
            }
            let mut out = Vec::new();
            for (lv, lb) in &l {
                for (rv, rb) in &r {
                    let mut vars = lv.clone();
                    vars.extend(rv.iter().cloned());
                    let mut blocks = lb.clone();
                    blocks.extend(rb.iter().cloned());
                    out.push((vars, blocks));
                }
            }
            Some(out)
        }
        CoreExpr::Or(a, b) => {
            let mut out = chains_of(a, taken, used)?;
            out.extend(chains_of(b, taken, used)?);
            (out.len() <= MAX_CHAINS).then_some(out)
        }
        CoreExpr::ExistsNum(v, body) => {
            let (name, body) = if taken.contains(v) {
                let fresh = fresh_name(used);
                let renamed = rename_num(body, v, &fresh);
                (fresh, renamed)
            } else {
                (v.clone(), body.as_ref().clone())
            };
            taken.insert(name.clone());
            let mut out = chains_of(&body, taken, used)?;
            for (vars, _) in &mut out {
                vars.insert(0, name.clone());
            }
            Some(out)
        }
        CoreExpr::Not(_) => {
            let (a, b) = e.as_and()?;
            for (restriction, body) in [(a, b), (b, a)] {
                if let Some(allowed) = star_of_symbols(restriction) {
                    let out = chains_of(body, taken, used)?;
                    let ok = out
                        .iter()
                        .all(|(_, blocks)| blocks.iter().all(|b| b.word.bytes().all(|c| allowed.contains(&c))));
                    return ok.then_some(out);
                }
            }
            None
        }
        _ => None,
    }
}

fn one() -> NumPredicate {
    NumPredicate::eq(LinTerm::constant(1))
}

/// `REP(>=0, s1 | ... | sk)` gives `{s1, ..., sk}`.
fn star_of_symbols(e: &CoreExpr) -> Option<BTreeSet<u8>> {
    fn leaves(e: &CoreExpr, out: &mut BTreeSet<u8>) -> bool {
        match e {
            CoreExpr::Atom(w) if w.len() == 1 => {
                out.insert(w.as_bytes()[0]);
                true
            }
            CoreExpr::Or(a, b) => leaves(a, out) && leaves(b, out),
            _ => false,
        }
    }
    match e {
        CoreExpr::Rep(p, a) if *p == NumPredicate::always() => {
            let mut out = BTreeSet::new();
            leaves(a, &mut out).then_some(out)
        }
        _ => None,
    }
}

/// Shortest `r` with `w = r^k`.
pub fn primitive_root(w: &str) -> (&str, usize) {
    let n = w.len();
    for p in 1..=n {
        if n % p == 0 && w.as_bytes().chunks(p).all(|c| c == &w.as_bytes()[..p]) {
            return (&w[..p], n / p);
        }
    }
    (w, 1)
}

/// Whether every word of `r1* ... rm*` has exactly one exponent vector.
pub fn skeleton_is_unambiguous(roots: &[String]) -> bool {
    // States: Boundary(k) after finishing a copy of block k (k = 0 is the
    // start), Inside(k, j) after reading j symbols of block k. Paths are in
    // bijection with exponent vectors, so the skeleton is unambiguous iff no
    // word has two accepting paths.
    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum S {
        Boundary(usize),
        Inside(usize, usize),
    }
    let r: Vec<&[u8]> = roots.iter().map(|s| s.as_bytes()).collect();
    let m = r.len();
    let step = |s: S, c: u8| -> Vec<S> {
        let mut out = Vec::new();
        match s {
            S::Boundary(k) => {
                for l in k.max(1)..=m {
                    if r[l - 1][0] == c {
                        out.push(if r[l - 1].len() == 1 { S::Boundary(l) } else { S::Inside(l, 1) });
                    }
                }
            }
            S::Inside(l, j) => {
                if r[l - 1][j] == c {
                    out.push(if j + 1 == r[l - 1].len() { S::Boundary(l) } else { S::Inside(l, j + 1) });
                }
            }
        }
        out
    };
    let symbols: BTreeSet<u8> = r.iter().flat_map(|w| w.iter().copied()).collect();
    let start = (S::Boundary(0), S::Boundary(0));
    let mut seen = HashSet::from([start]);
    let mut edges: Vec<((S, S), (S, S))> = Vec::new();
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        for &c in &symbols {
            for p2 in step(p, c) {
                for q2 in step(q, c) {
                    edges.push(((p, q), (p2, q2)));
                    if seen.insert((p2, q2)) {
                        queue.push_back((p2, q2));
                    }
                }
            }
        }
    }
    // pairs from which both runs can end together
    let accepting = |s: &(S, S)| matches!(s, (S::Boundary(_), S::Boundary(_)));
    let mut live: HashSet<(S, S)> = seen.iter().copied().filter(accepting).collect();
    loop {
        let before = live.len();
        for (from, to) in &edges {
            if live.contains(to) {
                live.insert(*from);
            }
        }
        if live.len() == before {
            break;
        }
    }
    !live.iter().any(|(p, q)| p != q)
}

/// Decides equivalence, choosing the strongest applicable method.
pub fn equiv(e1: &CoreExpr, e2: &CoreExpr, sigma: &Alphabet, opts: &EquivOptions) -> Result<Verdict, EquivError> {
    if !e1.is_closed() || !e2.is_closed() {
        return Err(EquivError::NotClosed);
    }
    let mut fallback = Fallback::Undecidable;
    let (r1, r2) = (eliminate_positions(e1, sigma), eliminate_positions(e2, sigma));
    if !r1.has_quantifier() && !r2.has_quantifier() {
        match equiv_automata(&r1, &r2, sigma, opts.state_budget) {
            Ok(v) => return confirm(v, e1, e2, sigma),
            Err(AutomataError::BudgetExceeded { .. }) => fallback = Fallback::AutomatonBudget,
            Err(e) => return Err(EquivError::Inconsistent(e.to_string())),
        }
    }
    if let (Some(b1), Some(b2)) = (normalize_block(e1), normalize_block(e2)) {
        match equiv_blocks(&b1, &b2, sigma, opts.formula_budget) {
            Ok(v) => return confirm(v, e1, e2, sigma),
            Err(reason) => fallback = reason,
        }
    }
    let bound = opts.bound_len.unwrap_or_else(|| default_bound(sigma));
    let mut v = equiv_bounded(e1, e2, sigma, bound)?;
    v.fallback = Some(fallback);
    Ok(v)
}

/// Re-checks a counterexample with the evaluator on the original expressions.
fn confirm(mut v: Verdict, e1: &CoreExpr, e2: &CoreExpr, sigma: &Alphabet) -> Result<Verdict, EquivError> {
    if let Some(c) = &mut v.counterexample {
        let in_first = Evaluator::new(e1, sigma).accepts(&c.word)?;
        let in_second = Evaluator::new(e2, sigma).accepts(&c.word)?;
        if in_first == in_second || (in_first, in_second) != (c.in_first, c.in_second) {
            return Err(EquivError::Inconsistent(format!("counterexample {:?} is not confirmed", c.word)));
        }
    }
    Ok(v)
}

/// Exact comparison of quantifier-free expressions.
pub fn equiv_automata(e1: &CoreExpr, e2: &CoreExpr, sigma: &Alphabet, limit: usize) -> Result<Verdict, AutomataError> {
    let d1 = compile_dfa(e1, sigma, limit)?;
    let d2 = compile_dfa(e2, sigma, limit)?;
    let counterexample = shortest_in_sym_diff(&d1, &d2).map(|w| Counterexample {
        in_first: d1.accepts(&w),
        in_second: d2.accepts(&w),
        word: w,
    });
    Ok(Verdict {
        status: if counterexample.is_some() { Status::Different } else { Status::Equivalent },
        method: Method::Automata,
        counterexample,
        fallback: None,
    })
}

/// Tests every word of length at most `bound`; the least differing word in
/// shortlex order wins.
pub fn equiv_bounded(e1: &CoreExpr, e2: &CoreExpr, sigma: &Alphabet, bound: usize) -> Result<Verdict, EquivError> {
    let (a, b) = (Evaluator::new(e1, sigma), Evaluator::new(e2, sigma));
    let words = sigma.words_up_to(bound);
    let found = words
        .par_iter()
        .map(|w| -> Result<Option<(bool, bool)>, EvalError> {
            let (x, y) = (a.accepts(w)?, b.accepts(w)?);
            Ok((x != y).then_some((x, y)))
        })
        .find_first(|r| !matches!(r, Ok(None)));
    match found {
        None => Ok(Verdict {
            status: Status::BoundedEquivalent(bound),
            method: Method::Bounded,
            counterexample: None,
            fallback: None,
        }),
        Some(Err(e)) => Err(e.into()),
        Some(Ok(flags)) => {
            let (in_first, in_second) = flags.expect("filtered");
            let word = words
                .iter()
                .find(|w| a.accepts(w).ok() == Some(in_first) && b.accepts(w).ok() == Some(in_second))
                .expect("word found in parallel search")
                .clone();
            Ok(Verdict {
                status: Status::Different,
                method: Method::Bounded,
                counterexample: Some(Counterexample { word, in_first, in_second }),
                fallback: None,
            })
        }
    }
}

/// A chain reduced to primitive roots, adjacent equal roots merged.
struct Reduced {
    vars: Vec<String>,
    roots: Vec<String>,
    /// Per merged group: `(power, count)` for each original block.
    groups: Vec<Vec<(usize, NumPredicate)>>,
}

fn reduce(vars: &[String], chain: &[Block]) -> Reduced {
    let mut roots: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<(usize, NumPredicate)>> = Vec::new();
    for b in chain {
        let (root, power) = primitive_root(&b.word);
        if roots.last().map(String::as_str) == Some(root) {
            groups.last_mut().unwrap().push((power, b.count.clone()));
        } else {
            roots.push(root.to_string());
            groups.push(vec![(power, b.count.clone())]);
        }
    }
    Reduced { vars: vars.to_vec(), roots, groups }
}

fn embed(small: &[String], target: &[String]) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(small.len());
    let mut t = 0;
    for r in small {
        while t < target.len() && &target[t] != r {
            t += 1;
        }
        if t == target.len() {
            return None;
        }
        out.push(t);
        t += 1;
    }
    Some(out)
}

fn exponent_var(k: usize) -> String {
    format!("n#{k}")
}

/// `phi(n_0, ..., n_{m-1})`: the exponent vectors of one block form.
fn exponent_formula(chains: &[(Reduced, Vec<usize>)], m: usize, tag: &str) -> F {
    let mut disjuncts = Vec::new();
    for (ci, (c, pos)) in chains.iter().enumerate() {
        let rename = |t: &LinTerm| c.vars.iter().fold(t.clone(), |t, v| t.rename(v, &format!("{tag}{ci}.{v}")));
        let mut sums = vec![LinTerm::constant(0); m];
        let mut conj = Vec::new();
        let mut fresh = Vec::new();
        for (g, group) in c.groups.iter().enumerate() {
            for (k, (power, p)) in group.iter().enumerate() {
                let count = match p.as_exact() {
                    Some(t) => {
                        let t = rename(t);
                        conj.push(F::geq(&t, &LinTerm::constant(0)));
                        t
                    }
                    None => {
                        let name = format!("{tag}{ci}.m{g}_{k}");
                        let mv = LinTerm::var(name.clone());
                        conj.push(F::from_predicate(&p.map_terms(&rename), &mv));
                        fresh.push(name);
                        mv
                    }
                };
                sums[pos[g]] = sums[pos[g]].plus(&count.scale(*power as i64));
            }
        }
        for (k, s) in sums.iter().enumerate() {
            conj.push(F::eq(&LinTerm::var(exponent_var(k)), s));
        }
        let body = F::And(conj);
        let bound: Vec<String> = c.vars.iter().map(|v| format!("{tag}{ci}.{v}")).chain(fresh).collect();
        disjuncts.push(bound.into_iter().rev().fold(body, |acc, v| F::exists(v, acc)));
    }
    F::Or(disjuncts)
}

/// Exact comparison of block forms. Returns the reason when it does not apply.
pub fn equiv_blocks(b1: &BlockForm, b2: &BlockForm, sigma: &Alphabet, limit: usize) -> Result<Verdict, Fallback> {
    let words_ok = |b: &BlockForm| b.chains.iter().flatten().all(|blk| sigma.accepts_word(&blk.word));
    if !words_ok(b1) || !words_ok(b2) {
        return Err(Fallback::SkeletonMismatch);
    }
    let form_vars = |b: &BlockForm| b.vars.clone();
    let r1: Vec<Reduced> = b1.chains.iter().map(|c| reduce(&form_vars(b1), c)).collect();
    let r2: Vec<Reduced> = b2.chains.iter().map(|c| reduce(&form_vars(b2), c)).collect();
    let target = r1.iter().chain(&r2).map(|r| &r.roots).max_by_key(|r| r.len()).cloned().unwrap_or_default();
    let place = |rs: Vec<Reduced>| -> Result<Vec<(Reduced, Vec<usize>)>, Fallback> {
        rs.into_iter()
            .map(|r| {
                let pos = embed(&r.roots, &target).ok_or(Fallback::SkeletonMismatch)?;
                Ok((r, pos))
            })
            .collect()
    };
    let (p1, p2) = (place(r1)?, place(r2)?);
    let m = target.len();
    let phi1 = exponent_formula(&p1, m, "L");
    let phi2 = exponent_formula(&p2, m, "R");
    let sentence = (0..m).rev().fold(F::iff(phi1.clone(), phi2.clone()), |acc, k| F::forall(exponent_var(k), acc));
    let over = |_: PresburgerError| Fallback::PresburgerBudget;
    if decide_with_budget(&sentence, limit).map_err(over)? {
        return Ok(Verdict {
            status: Status::Equivalent,
            method: Method::BlockPresburger,
            counterexample: None,
            fallback: None,
        });
    }
    if !skeleton_is_unambiguous(&target) {
        return Err(Fallback::AmbiguousSkeleton);
    }
    let q1 = eliminate_with_budget(&phi1, limit).map_err(over)?;
    let q2 = eliminate_with_budget(&phi2, limit).map_err(over)?;
    let word = least_differing_word(&target, sigma, &q1, &q2).ok_or(Fallback::PresburgerBudget)?;
    Ok(Verdict {
        status: Status::Different,
        method: Method::BlockPresburger,
        counterexample: Some(Counterexample { word: word.0, in_first: word.1, in_second: !word.1 }),
        fallback: None,
    })
}

/// Shortlex-least word of the skeleton whose exponent vector satisfies
/// exactly one of `q1`, `q2`. The flag says whether it is in the first set.
fn least_differing_word(roots: &[String], sigma: &Alphabet, q1: &F, q2: &F) -> Option<(String, bool)> {
    const MAX_VECTORS: usize = 2_000_000;
    const MAX_LEN: usize = 4096;
    let lens: Vec<usize> = roots.iter().map(String::len).collect();
    let mut visited = 0usize;
    for total in 0..=MAX_LEN {
        let mut found: Vec<(Vec<usize>, String, bool)> = Vec::new();
        let mut n = vec![0usize; roots.len()];
        // depth-first over vectors with sum(n_k * |r_k|) == total
        fn go(
            k: usize,
            left: usize,
            n: &mut Vec<usize>,
            lens: &[usize],
            visit: &mut dyn FnMut(&[usize]) -> bool,
        ) -> bool {
            if k == lens.len() {
                return left == 0 && visit(n);
            }
            for c in 0..=left / lens[k] {
                n[k] = c;
                if go(k + 1, left - c * lens[k], n, lens, visit) {
                    return true;
                }
            }
            n[k] = 0;
            false
        }
        let mut over = false;
        go(0, total, &mut n, &lens, &mut |vec: &[usize]| {
            visited += 1;
            if visited > MAX_VECTORS {
                over = true;
                return true;
            }
            let lookup = |v: &str| v.strip_prefix("n#").and_then(|k| k.parse::<usize>().ok()).map(|k| vec[k] as i64);
            let a = q1.eval(&lookup).ok().flatten().unwrap_or(false);
            let b = q2.eval(&lookup).ok().flatten().unwrap_or(false);
            if a != b {
                let word: String = vec.iter().zip(roots).map(|(c, r)| r.repeat(*c)).collect();
                found.push((vec.to_vec(), word, a));
            }
            false
        });
        if over {
            return None;
        }
        if let Some((_, w, a)) = found
            .into_iter()
            .min_by_key(|(_, w, _)| w.bytes().map(|c| sigma.index_of(c).unwrap_or(usize::MAX)).collect::<Vec<_>>())
        {
            return Some((w, a));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::parse_regex;
    use crate::automata::{determinize, minimize};
    use crate::parser::parse;
    use crate::syntax::expand_sugar;

    fn ab() -> Alphabet {
        Alphabet::parse_list("a,b").unwrap()
    }

    fn core(text: &str) -> CoreExpr {
        expand_sugar(&parse(text).unwrap(), &ab()).unwrap()
    }

    fn run(a: &str, b: &str) -> Verdict {
        equiv(&core(a), &core(b), &ab(), &EquivOptions::default()).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&core("HAS(=3, a)"), &ab()), Class::Regular);
        assert_eq!(classify(&core("EXISTS i EXISTS j [REP(=j, a) . REP(=i, b) . REP(=i+j, ab)]"), &ab()), Class::Block);
        assert_eq!(classify(&core("EXISTSSTR u [a . $u . $u]"), &ab()), Class::General);
    }

    #[test]
    fn block_normalization() {
        let f = normalize_block(&core("EXISTS i [REP(=i, a) . REP(=i, b)]")).unwrap();
        assert_eq!(f.vars, ["i"]);
        let i = LinTerm::var("i");
        assert_eq!(
            f.chains,
            [vec![
                Block { word: "a".into(), count: NumPredicate::eq(i.clone()) },
                Block { word: "b".into(), count: NumPredicate::eq(i) },
            ]]
        );
        let g = normalize_block(&core("EXISTS i EXISTS j [REP(=j, a) . REP(=i, b) . REP(=i+j, ab)]")).unwrap();
        let words: Vec<&str> = g.chains[0].iter().map(|b| b.word.as_str()).collect();
        assert_eq!(words, ["a", "b", "ab"]);
        assert_eq!(g.chains[0][2].count.as_exact(), Some(&LinTerm::var("i").plus(&LinTerm::var("j"))));
        assert!(normalize_block(&core("HAS(=3, a)")).is_none());
        assert!(normalize_block(&core("ALPH(a,b): EXISTS i [REP(=i, a) . b]")).is_some());
    }

    #[test]
    fn shadowed_binders_are_renamed_apart() {
        let f = normalize_block(&core("EXISTS i [REP(=i, a)] . EXISTS i [REP(=i+1, b)]")).unwrap();
        assert_eq!(f.vars.len(), 2);
        assert_ne!(f.chains[0][0].count, f.chains[0][1].count.substitute(&f.vars[1], &LinTerm::var(&f.vars[0])));
    }

    #[test]
    fn roots_and_ambiguity() {
        assert_eq!(primitive_root("abab"), ("ab", 2));
        assert_eq!(primitive_root("aba"), ("aba", 1));
        let s = |xs: &[&str]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert!(skeleton_is_unambiguous(&s(&["a", "b"])));
        assert!(skeleton_is_unambiguous(&s(&["ab", "b"])));
        assert!(!skeleton_is_unambiguous(&s(&["a", "b", "ab"])));
        assert!(!skeleton_is_unambiguous(&s(&["a", "b", "a"])));
        assert!(!skeleton_is_unambiguous(&s(&["a", "aa"])));
    }

    #[test]
    fn example_one() {
        let v = run("HAS(REP(=3, a))", "HAS(=3, a)");
        assert_eq!((v.status, v.method), (Status::Different, Method::Automata));
        let c = v.counterexample.unwrap();
        assert_eq!((c.word.as_str(), c.in_first, c.in_second), ("aaaa", true, false));
    }

    #[test]
    fn r1_against_its_regex() {
        let sigma = ab();
        let e = core("a . REP(>=1, b)");
        let re = minimize(&determinize(&parse_regex("abb*", &sigma).unwrap(), DEFAULT_STATE_BUDGET).unwrap());
        assert_eq!(compile_dfa(&e, &sigma, DEFAULT_STATE_BUDGET).unwrap(), re);
    }

    #[test]
    fn block_pairs() {
        let anbn = "EXISTS i [REP(=i, a) . REP(=i, b)]";
        let v = run(anbn, anbn);
        assert_eq!((v.status, v.method), (Status::Equivalent, Method::BlockPresburger));
        let v = run(anbn, "REP(a) . REP(b)");
        assert_eq!(v.status, Status::Different);
        assert_eq!(v.counterexample.unwrap().word, "a");
        let v = run(anbn, "EXISTS k [REP(=k, b) | REP(=k, a) . REP(=k, b)]");
        assert_eq!(v.status, Status::Different);
        let v = run("EXISTS i [REP(=2*i, ab)]", "EXISTS i [REP(=i, abab)]");
        assert_eq!((v.status, v.method), (Status::Equivalent, Method::BlockPresburger));
        let v = run("EXISTS i [REP(=i, a) . REP(=i+3, b)]", "EXISTS i [REP(=i, a) . bbb . REP(=i, b)]");
        assert_eq!((v.status, v.method), (Status::Equivalent, Method::BlockPresburger));
    }

    #[test]
    fn example_two() {
        let wrong = "EXISTS i [a . REP(=i, b) . REP(=i+1, ab)]";
        let right = "EXISTS i EXISTS j [REP(=j, a) . REP(=i, b) . REP(=i+j, ab)]";
        let v = run(right, wrong);
        assert_eq!(v.status, Status::Different);
        assert_eq!(v.fallback, Some(Fallback::AmbiguousSkeleton));
        let c = v.counterexample.unwrap();
        assert_ne!(c.in_first, c.in_second);
    }

    #[test]
    fn general_pairs_are_bounded() {
        let v = run("EXISTSSTR u [$u . $u]", "REP(EVEN, TOP) & EXISTSSTR u [$u . $u]");
        assert_eq!(v.status, Status::BoundedEquivalent(12));
        assert_eq!((v.method, v.fallback), (Method::Bounded, Some(Fallback::Undecidable)));
    }
}
