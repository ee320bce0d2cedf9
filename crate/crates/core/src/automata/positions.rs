//! Elimination of position quantifiers.
//!
//! `AT` and `RANGE` desugar to `LEN=(i-1) . (phi & LEN=w) . TOP`, so a number
//! variable used only as such an index ranges over positions of the word.
//! When the body of `EXISTS i` is a Boolean combination of fixed-width
//! windows at offsets `i + c` and of formulas that do not mention `i`, the
//! quantifier can be replaced by a finite disjunction over what the windows
//! see: a factor `u` of the word, possibly clipped at either end.

use std::collections::HashMap;

use crate::eval::Evaluator;
use crate::syntax::{Alphabet, CoreExpr, LinTerm, NumPredicate};

/// Caps the number of window contents examined per quantifier.
const MAX_WINDOW_CASES: usize = 20_000;
const MAX_OPAQUE: usize = 4;

/// Rewrites every eligible `EXISTS` (and hence `FORALL`) into an equivalent
/// quantifier-free expression. Ineligible quantifiers are left in place.
pub fn eliminate_positions(e: &CoreExpr, sigma: &Alphabet) -> CoreExpr {
    let rebuilt = match e {
        CoreExpr::Atom(_) | CoreExpr::StrVar(_) => return e.clone(),
        CoreExpr::Not(a) => CoreExpr::not(eliminate_positions(a, sigma)),
        CoreExpr::Or(a, b) => CoreExpr::or(eliminate_positions(a, sigma), eliminate_positions(b, sigma)),
        CoreExpr::Concat(a, b) => CoreExpr::concat(eliminate_positions(a, sigma), eliminate_positions(b, sigma)),
        CoreExpr::Rep(p, a) => CoreExpr::rep(p.clone(), eliminate_positions(a, sigma)),
        CoreExpr::Has(p, a) => CoreExpr::has(p.clone(), eliminate_positions(a, sigma)),
        CoreExpr::Reverse(a) => CoreExpr::Reverse(Box::new(eliminate_positions(a, sigma))),
        CoreExpr::ExistsStr(v, a) => CoreExpr::ExistsStr(v.clone(), Box::new(eliminate_positions(a, sigma))),
        CoreExpr::ExistsNum(v, a) => CoreExpr::exists(v.clone(), eliminate_positions(a, sigma)),
    };
    if let CoreExpr::ExistsNum(v, body) = &rebuilt {
        if let Some(out) = eliminate_one(v, body, sigma) {
            return out;
        }
    }
    rebuilt
}

struct Window<'a> {
    offset: i64,
    width: usize,
    body: &'a CoreExpr,
}

enum Shape {
    Window(usize),
    Opaque(usize),
    Not(Box<Shape>),
    Or(Box<Shape>, Box<Shape>),
}

impl Shape {
    fn eval(&self, windows: &[bool], opaque: &[bool]) -> bool {
        match self {
            Shape::Window(i) => windows[*i],
            Shape::Opaque(i) => opaque[*i],
            Shape::Not(a) => !a.eval(windows, opaque),
            Shape::Or(a, b) => a.eval(windows, opaque) || b.eval(windows, opaque),
        }
    }
}

fn mentions(e: &CoreExpr, v: &str) -> bool {
    e.free_vars().0.contains(v)
}

fn is_any_symbol(e: &CoreExpr, sigma: &Alphabet) -> bool {
    fn leaves<'a>(e: &'a CoreExpr, out: &mut Vec<&'a str>) -> bool {
        match e {
            CoreExpr::Atom(w) if w.len() == 1 => {
                out.push(w);
                true
            }
            CoreExpr::Or(a, b) => leaves(a, out) && leaves(b, out),
            _ => false,
        }
    }
    let mut out = Vec::new();
    if !leaves(e, &mut out) {
        return false;
    }
    out.sort_unstable();
    out.dedup();
    out.len() == sigma.len() && out.iter().all(|w| sigma.contains(w.chars().next().unwrap()))
}

/// `LEN = t` with `t` exact.
fn as_len_eq<'a>(e: &'a CoreExpr, sigma: &Alphabet) -> Option<&'a LinTerm> {
    match e {
        CoreExpr::Rep(p, x) if is_any_symbol(x, sigma) => p.as_exact(),
        _ => None,
    }
}

fn as_window<'a>(e: &'a CoreExpr, v: &str, sigma: &Alphabet) -> Option<Window<'a>> {
    let (before, mid) = match e {
        CoreExpr::Concat(l, r) if r.is_top() => match l.as_ref() {
            CoreExpr::Concat(before, mid) => (before.as_ref(), mid.as_ref()),
            _ => return None,
        },
        CoreExpr::Concat(before, r) => match r.as_ref() {
            CoreExpr::Concat(mid, top) if top.is_top() => (before.as_ref(), mid.as_ref()),
            _ => return None,
        },
        _ => return None,
    };
    let start = as_len_eq(before, sigma)?;
    if start.coeff(v) != 1 || start.vars().count() != 1 {
        return None;
    }
    let (a, b) = mid.as_and()?;
    let (body, width) = match (as_len_eq(b, sigma), as_len_eq(a, sigma)) {
        (Some(w), _) if w.is_constant() => (a, w),
        (_, Some(w)) if w.is_constant() => (b, w),
        _ => return None,
    };
    let width = usize::try_from(width.constant_part()).ok().filter(|&w| w >= 1)?;
    if !body.is_closed() {
        return None;
    }
    Some(Window { offset: start.constant_part(), width, body })
}

fn shape<'a>(
    e: &'a CoreExpr,
    v: &str,
    sigma: &Alphabet,
    windows: &mut Vec<Window<'a>>,
    opaque: &mut Vec<&'a CoreExpr>,
) -> Option<Shape> {
    if !mentions(e, v) {
        opaque.push(e);
        return Some(Shape::Opaque(opaque.len() - 1));
    }
    if let Some(w) = as_window(e, v, sigma) {
        windows.push(w);
        return Some(Shape::Window(windows.len() - 1));
    }
    match e {
        CoreExpr::Not(a) => Some(Shape::Not(Box::new(shape(a, v, sigma, windows, opaque)?))),
        CoreExpr::Or(a, b) => Some(Shape::Or(
            Box::new(shape(a, v, sigma, windows, opaque)?),
            Box::new(shape(b, v, sigma, windows, opaque)?),
        )),
        _ => None,
    }
}

fn eliminate_one(v: &str, body: &CoreExpr, sigma: &Alphabet) -> Option<CoreExpr> {
    let mut windows = Vec::new();
    let mut opaque = Vec::new();
    let shape = shape(body, v, sigma, &mut windows, &mut opaque)?;
    if windows.is_empty() || opaque.len() > MAX_OPAQUE {
        return None;
    }
    let lo = windows.iter().map(|w| w.offset).min()?;
    let hi = windows.iter().map(|w| w.offset + w.width as i64).max()?;
    let span = (hi - lo) as usize;
    let k = sigma.len();
    let mut cases = 0usize;
    for m in 1..=span {
        cases = cases.saturating_add(k.saturating_pow(m as u32).saturating_mul(span - m + 1));
    }
    if cases > MAX_WINDOW_CASES {
        return None;
    }

    let evaluators: Vec<Evaluator> = windows.iter().map(|w| Evaluator::new(w.body, sigma)).collect();
    let mut memo: HashMap<(usize, String), bool> = HashMap::new();
    let mut matches = |i: usize, word: &str| -> bool {
        *memo.entry((i, word.to_string())).or_insert_with(|| evaluators[i].accepts(word).expect("closed window body"))
    };

    let any = || CoreExpr::or_all(sigma.chars().map(|c| CoreExpr::atom(c.to_string())).collect());
    let at_least = |n: i64| {
        if n <= 0 {
            CoreExpr::top()
        } else {
            CoreExpr::rep(NumPredicate::Geq(LinTerm::constant(n)), any())
        }
    };

    let mut disjuncts = Vec::new();
    for beta in 0..(1usize << opaque.len()) {
        let fixed: Vec<bool> = (0..opaque.len()).map(|i| beta >> i & 1 == 1).collect();
        let guard = opaque.iter().zip(&fixed).fold(CoreExpr::top(), |acc, (o, &on)| {
            let lit = if on { (*o).clone() } else { CoreExpr::not((*o).clone()) };
            if acc.is_top() {
                lit
            } else {
                CoreExpr::and(acc, lit)
            }
        });
        // A large enough index puts every window past the end of the word.
        if shape.eval(&vec![false; windows.len()], &fixed) {
            disjuncts.push(guard);
            continue;
        }
        let mut patterns = Vec::new();
        for left in 0..=span {
            if left > 0 && left as i64 > -lo {
                break;
            }
            for right in 0..=span - left {
                let m = span - left - right;
                if m == 0 {
                    continue;
                }
                for u in sigma.words_of_len(m) {
                    let truths: Vec<bool> = windows
                        .iter()
                        .enumerate()
                        .map(|(i, w)| {
                            let from = (w.offset - lo) as usize;
                            let to = from + w.width;
                            from >= left && to <= span - right && matches(i, &u[from - left..to - left])
                        })
                        .collect();
                    if !shape.eval(&truths, &fixed) {
                        continue;
                    }
                    let word = CoreExpr::atom(u.clone());
                    patterns.push(match (left > 0, right > 0) {
                        (true, true) => word,
                        (true, false) => CoreExpr::concat(word, CoreExpr::top()),
                        (false, true) => CoreExpr::concat(at_least(lo), word),
                        (false, false) => CoreExpr::concat(CoreExpr::concat(at_least(lo), word), CoreExpr::top()),
                    });
                }
            }
        }
        if !patterns.is_empty() {
            let alts = CoreExpr::or_all(patterns);
            disjuncts.push(if guard.is_top() { alts } else { CoreExpr::and(guard, alts) });
        }
    }
    Some(CoreExpr::or_all(disjuncts))
}
