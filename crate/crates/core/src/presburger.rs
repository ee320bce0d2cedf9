//! Linear integer arithmetic over the naturals.
//!
//! Quantifiers range over ℕ₀. [`eliminate`] removes them with Cooper's
//! method over ℤ after guarding every bound variable with `x >= 0`, so the
//! result is equivalent for every assignment of the free variables.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::syntax::{lcm, LinTerm, NumPredicate};

/// Cap on the node count of intermediate formulas.
pub const DEFAULT_FORMULA_BUDGET: usize = 400_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresburgerError {
    #[error("formula exceeds the size budget of {limit} nodes")]
    BudgetExceeded { limit: usize },
    #[error("formula has free variables: {}", .0.join(", "))]
    NotASentence(Vec<String>),
    #[error("cannot evaluate a quantified formula directly")]
    Quantified,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresburgerFormula {
    Const(bool),
    /// `t >= 0`
    Geq(LinTerm),
    /// `m | t`, that is `t ≡ 0 (mod m)`, with `m >= 1`.
    Divides(u64, LinTerm),
    Not(Box<PresburgerFormula>),
    And(Vec<PresburgerFormula>),
    Or(Vec<PresburgerFormula>),
    Exists(String, Box<PresburgerFormula>),
    Forall(String, Box<PresburgerFormula>),
}

use PresburgerFormula as F;

impl PresburgerFormula {
    /// `a >= b`
    pub fn geq(a: &LinTerm, b: &LinTerm) -> F {
        F::Geq(a.minus(b))
    }

    /// `a <= b`
    pub fn leq(a: &LinTerm, b: &LinTerm) -> F {
        F::Geq(b.minus(a))
    }

    pub fn eq(a: &LinTerm, b: &LinTerm) -> F {
        F::And(vec![F::geq(a, b), F::leq(a, b)])
    }

    /// `t ≡ r (mod m)`
    pub fn congruent(t: &LinTerm, r: i64, m: u64) -> F {
        assert!(m >= 1, "modulus must be positive");
        F::Divides(m, t.offset(-r))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: F) -> F {
        F::Not(Box::new(f))
    }

    pub fn and(a: F, b: F) -> F {
        F::And(vec![a, b])
    }

    pub fn or(a: F, b: F) -> F {
        F::Or(vec![a, b])
    }

    pub fn implies(a: F, b: F) -> F {
        F::Or(vec![F::not(a), b])
    }

    pub fn iff(a: F, b: F) -> F {
        F::Or(vec![F::And(vec![a.clone(), b.clone()]), F::And(vec![F::not(a), F::not(b)])])
    }

    pub fn exists(v: impl Into<String>, f: F) -> F {
        F::Exists(v.into(), Box::new(f))
    }

    pub fn forall(v: impl Into<String>, f: F) -> F {
        F::Forall(v.into(), Box::new(f))
    }

    /// The formula `p(n)`.
    pub fn from_predicate(p: &NumPredicate, n: &LinTerm) -> F {
        match p {
            NumPredicate::Geq(t) => F::geq(n, t),
            NumPredicate::Cong(t, m) => F::Divides(*m, n.minus(t)),
            NumPredicate::Not(a) => F::not(F::from_predicate(a, n)),
            NumPredicate::And(a, b) => F::and(F::from_predicate(a, n), F::from_predicate(b, n)),
            NumPredicate::Or(a, b) => F::or(F::from_predicate(a, n), F::from_predicate(b, n)),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            F::Const(_) => {}
            F::Geq(t) | F::Divides(_, t) => {
                out.extend(t.vars().filter(|v| !bound.iter().any(|b| b == v)).map(str::to_string))
            }
            F::Not(a) => a.collect_free(bound, out),
            F::And(xs) | F::Or(xs) => xs.iter().for_each(|x| x.collect_free(bound, out)),
            F::Exists(v, a) | F::Forall(v, a) => {
                bound.push(v.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            F::Const(_) | F::Geq(_) | F::Divides(..) => true,
            F::Not(a) => a.is_quantifier_free(),
            F::And(xs) | F::Or(xs) => xs.iter().all(F::is_quantifier_free),
            F::Exists(..) | F::Forall(..) => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            F::Const(_) | F::Geq(_) | F::Divides(..) => 1,
            F::Not(a) | F::Exists(_, a) | F::Forall(_, a) => 1 + a.size(),
            F::And(xs) | F::Or(xs) => 1 + xs.iter().map(F::size).sum::<usize>(),
        }
    }

    /// Truth of a quantifier-free formula; `Ok(None)` when a variable has no value.
    pub fn eval<L>(&self, lookup: &L) -> Result<Option<bool>, PresburgerError>
    where
        L: Fn(&str) -> Option<i64>,
    {
        Ok(match self {
            F::Const(b) => Some(*b),
            F::Geq(t) => t.eval(lookup).map(|v| v >= 0),
            F::Divides(m, t) => t.eval(lookup).map(|v| v.rem_euclid(*m as i64) == 0),
            F::Not(a) => a.eval(lookup)?.map(|b| !b),
            F::And(xs) => {
                let mut out = Some(true);
                for x in xs {
                    match x.eval(lookup)? {
                        Some(false) => return Ok(Some(false)),
                        None => out = None,
                        Some(true) => {}
                    }
                }
                out
            }
            F::Or(xs) => {
                let mut out = Some(false);
                for x in xs {
                    match x.eval(lookup)? {
                        Some(true) => return Ok(Some(true)),
                        None => out = None,
                        Some(false) => {}
                    }
                }
                out
            }
            F::Exists(..) | F::Forall(..) => return Err(PresburgerError::Quantified),
        })
    }

    fn substitute(&self, v: &str, value: &LinTerm) -> F {
        match self {
            F::Const(_) => self.clone(),
            F::Geq(t) => F::Geq(t.substitute(v, value)),
            F::Divides(m, t) => F::Divides(*m, t.substitute(v, value)),
            F::Not(a) => F::not(a.substitute(v, value)),
            F::And(xs) => F::And(xs.iter().map(|x| x.substitute(v, value)).collect()),
            F::Or(xs) => F::Or(xs.iter().map(|x| x.substitute(v, value)).collect()),
            F::Exists(..) | F::Forall(..) => unreachable!("substitution into quantified formula"),
        }
    }

    fn mentions(&self, v: &str) -> bool {
        match self {
            F::Const(_) => false,
            F::Geq(t) | F::Divides(_, t) => t.coeff(v) != 0,
            F::Not(a) | F::Exists(_, a) | F::Forall(_, a) => a.mentions(v),
            F::And(xs) | F::Or(xs) => xs.iter().any(|x| x.mentions(v)),
        }
    }
}

impl fmt::Display for PresburgerFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, xs: &[F], op: &str| -> fmt::Result {
            write!(f, "(")?;
            for (i, x) in xs.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        };
        match self {
            F::Const(b) => write!(f, "{}", if *b { "true" } else { "false" }),
            F::Geq(t) => write!(f, "{t} >= 0"),
            F::Divides(m, t) => write!(f, "{m} | {t}"),
            F::Not(a) => write!(f, "!{a}"),
            F::And(xs) => join(f, xs, "&"),
            F::Or(xs) => join(f, xs, "|"),
            F::Exists(v, a) => write!(f, "EXISTS {v}. {a}"),
            F::Forall(v, a) => write!(f, "FORALL {v}. {a}"),
        }
    }
}

fn term_from(coeffs: &[(String, i64)], constant: i64) -> LinTerm {
    coeffs.iter().fold(LinTerm::constant(constant), |acc, (v, c)| acc.plus(&LinTerm::scaled_var(v.clone(), *c)))
}

fn gcd_i(a: i64, b: i64) -> i64 {
    crate::syntax::gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Folds constant atoms and divides out common factors.
fn norm_atom(f: F) -> F {
    match f {
        F::Geq(t) => {
            if t.is_constant() {
                return F::Const(t.constant_part() >= 0);
            }
            let g = t.coeffs().fold(0, |g, (_, c)| gcd_i(g, c));
            if g > 1 {
                let coeffs: Vec<(String, i64)> = t.coeffs().map(|(v, c)| (v.to_string(), c / g)).collect();
                F::Geq(term_from(&coeffs, t.constant_part().div_euclid(g)))
            } else {
                F::Geq(t)
            }
        }
        F::Divides(m, t) => {
            let mi = m as i64;
            let coeffs: Vec<(String, i64)> =
                t.coeffs().map(|(v, c)| (v.to_string(), c.rem_euclid(mi))).filter(|(_, c)| *c != 0).collect();
            let c = t.constant_part().rem_euclid(mi);
            if coeffs.is_empty() {
                return F::Const(c == 0);
            }
            let g = coeffs.iter().fold(gcd_i(c, mi), |g, (_, k)| gcd_i(g, *k));
            let coeffs: Vec<(String, i64)> = coeffs.into_iter().map(|(v, k)| (v, k / g)).collect();
            F::Divides((mi / g) as u64, term_from(&coeffs, c / g))
        }
        other => other,
    }
}

fn mk_and(xs: Vec<F>) -> F {
    let mut out = Vec::new();
    for x in xs {
        match x {
            F::Const(true) => {}
            F::Const(false) => return F::Const(false),
            F::And(ys) => out.extend(ys),
            other => out.push(other),
        }
    }
    out.sort();
    out.dedup();
    match out.len() {
        0 => F::Const(true),
        1 => out.pop().unwrap(),
        _ => F::And(out),
    }
}

fn mk_or(xs: Vec<F>) -> F {
    let mut out = Vec::new();
    for x in xs {
        match x {
            F::Const(false) => {}
            F::Const(true) => return F::Const(true),
            F::Or(ys) => out.extend(ys),
            other => out.push(other),
        }
    }
    out.sort();
    out.dedup();
    match out.len() {
        0 => F::Const(false),
        1 => out.pop().unwrap(),
        _ => F::Or(out),
    }
}

/// Negation normal form of a quantifier-free formula. Literals are `Geq`,
/// `Divides` and negated `Divides`; `!(t >= 0)` becomes `-t-1 >= 0`.
fn nnf(f: &F, positive: bool) -> F {
    match f {
        F::Const(b) => F::Const(*b == positive),
        F::Geq(t) => norm_atom(if positive { F::Geq(t.clone()) } else { F::Geq(t.scale(-1).offset(-1)) }),
        F::Divides(..) => match norm_atom(f.clone()) {
            F::Const(b) => F::Const(b == positive),
            atom if positive => atom,
            atom => F::not(atom),
        },
        F::Not(a) => nnf(a, !positive),
        F::And(xs) if positive => mk_and(xs.iter().map(|x| nnf(x, true)).collect()),
        F::And(xs) => mk_or(xs.iter().map(|x| nnf(x, false)).collect()),
        F::Or(xs) if positive => mk_or(xs.iter().map(|x| nnf(x, true)).collect()),
        F::Or(xs) => mk_and(xs.iter().map(|x| nnf(x, false)).collect()),
        F::Exists(..) | F::Forall(..) => unreachable!("nnf of quantified formula"),
    }
}

/// Applies `f` to every literal of an NNF formula and re-simplifies.
fn map_literals(f: &F, g: &mut dyn FnMut(&F) -> F) -> F {
    match f {
        F::And(xs) => mk_and(xs.iter().map(|x| map_literals(x, g)).collect()),
        F::Or(xs) => mk_or(xs.iter().map(|x| map_literals(x, g)).collect()),
        lit => g(lit),
    }
}

fn visit_literals<'a>(f: &'a F, g: &mut dyn FnMut(&'a F)) {
    match f {
        F::And(xs) | F::Or(xs) => xs.iter().for_each(|x| visit_literals(x, g)),
        lit => g(lit),
    }
}

fn literal_term(lit: &F) -> Option<&LinTerm> {
    match lit {
        F::Geq(t) | F::Divides(_, t) => Some(t),
        F::Not(a) => literal_term(a),
        _ => None,
    }
}

fn subst_nnf(f: &F, v: &str, value: &LinTerm) -> F {
    map_literals(f, &mut |lit| nnf(&lit.substitute(v, value), true))
}

struct Eliminator {
    limit: usize,
}

impl Eliminator {
    fn check(&self, f: &F) -> Result<(), PresburgerError> {
        if f.size() > self.limit {
            Err(PresburgerError::BudgetExceeded { limit: self.limit })
        } else {
            Ok(())
        }
    }

    fn qe(&self, f: &F) -> Result<F, PresburgerError> {
        let out = match f {
            F::Const(_) | F::Geq(_) | F::Divides(..) => nnf(f, true),
            F::Not(a) => nnf(&self.qe(a)?, false),
            F::And(xs) => mk_and(xs.iter().map(|x| self.qe(x)).collect::<Result<_, _>>()?),
            F::Or(xs) => mk_or(xs.iter().map(|x| self.qe(x)).collect::<Result<_, _>>()?),
            F::Exists(v, a) => {
                let body = self.qe(a)?;
                self.exists(v, &body)?
            }
            F::Forall(v, a) => {
                let body = nnf(&self.qe(a)?, false);
                nnf(&self.exists(v, &body)?, false)
            }
        };
        self.check(&out)?;
        Ok(out)
    }

    /// `EXISTS v >= 0. body` for a quantifier-free NNF body.
    fn exists(&self, v: &str, body: &F) -> Result<F, PresburgerError> {
        if !body.mentions(v) {
            return Ok(body.clone());
        }
        let guarded = mk_and(vec![F::Geq(LinTerm::var(v)), body.clone()]);
        match guarded {
            F::Or(ds) => {
                let mut out = Vec::with_capacity(ds.len());
                for d in &ds {
                    let e = self.exists_conj(v, d)?;
                    if e == F::Const(true) {
                        return Ok(e);
                    }
                    out.push(e);
                }
                let out = mk_or(out);
                self.check(&out)?;
                Ok(out)
            }
            other => self.exists_conj(v, &other),
        }
    }

    fn exists_conj(&self, v: &str, f: &F) -> Result<F, PresburgerError> {
        if !f.mentions(v) {
            return Ok(f.clone());
        }
        if let Some(value) = unit_equality(f, v) {
            return Ok(subst_nnf(f, v, &value));
        }
        self.cooper(v, f)
    }

    fn cooper(&self, v: &str, f: &F) -> Result<F, PresburgerError> {
        // Scale so that every occurrence of v has coefficient +-delta, then
        // read delta*v as a fresh v constrained by delta | v.
        let mut delta = 1u64;
        visit_literals(f, &mut |lit| {
            if let Some(t) = literal_term(lit) {
                let c = t.coeff(v);
                if c != 0 {
                    delta = lcm(delta, c.unsigned_abs());
                }
            }
        });
        let d = delta as i64;
        let unit = |t: &LinTerm, k: i64| -> LinTerm {
            let scaled = t.scale(k);
            let sign = scaled.coeff(v).signum();
            scaled.minus(&LinTerm::scaled_var(v, sign * d)).plus(&LinTerm::scaled_var(v, sign))
        };
        let scale_lit = |lit: &F| -> F {
            fn go(lit: &F, v: &str, d: i64, unit: &dyn Fn(&LinTerm, i64) -> LinTerm) -> F {
                match lit {
                    F::Geq(t) if t.coeff(v) != 0 => F::Geq(unit(t, d / t.coeff(v).abs())),
                    F::Divides(m, t) if t.coeff(v) != 0 => {
                        let k = d / t.coeff(v).abs();
                        F::Divides(m * k as u64, unit(t, k))
                    }
                    F::Not(a) => F::not(go(a, v, d, unit)),
                    other => other.clone(),
                }
            }
            go(lit, v, d, &unit)
        };
        let mut scaled = map_literals(f, &mut |lit| scale_lit(lit));
        if delta > 1 {
            scaled = mk_and(vec![scaled, F::Divides(delta, LinTerm::var(v))]);
        }

        let mut period = 1u64;
        let mut lower: BTreeSet<LinTerm> = BTreeSet::new();
        visit_literals(&scaled, &mut |lit| match lit {
            F::Divides(m, t) if t.coeff(v) != 0 => period = lcm(period, *m),
            F::Not(a) => {
                if let F::Divides(m, t) = a.as_ref() {
                    if t.coeff(v) != 0 {
                        period = lcm(period, *m);
                    }
                }
            }
            // v + s >= 0 gives the candidate v = -s
            F::Geq(t) if t.coeff(v) == 1 => {
                lower.insert(LinTerm::var(v).minus(t));
            }
            _ => {}
        });
        if period as usize * (lower.len() + 1) * scaled.size() > self.limit {
            return Err(PresburgerError::BudgetExceeded { limit: self.limit });
        }

        let minus_inf = map_literals(&scaled, &mut |lit| match lit {
            F::Geq(t) if t.coeff(v) > 0 => F::Const(false),
            F::Geq(t) if t.coeff(v) < 0 => F::Const(true),
            other => other.clone(),
        });
        let mut out = Vec::new();
        let mut size = 0;
        let mut push = |g: F| -> Result<bool, PresburgerError> {
            if g == F::Const(true) {
                return Ok(true);
            }
            size += g.size();
            if size > self.limit {
                return Err(PresburgerError::BudgetExceeded { limit: self.limit });
            }
            out.push(g);
            Ok(false)
        };
        if minus_inf != F::Const(false) {
            for j in 0..period as i64 {
                if push(subst_nnf(&minus_inf, v, &LinTerm::constant(j)))? {
                    return Ok(F::Const(true));
                }
            }
        }
        for b in &lower {
            for j in 0..period as i64 {
                if push(subst_nnf(&scaled, v, &b.offset(j)))? {
                    return Ok(F::Const(true));
                }
            }
        }
        Ok(mk_or(out))
    }
}

/// Finds `v = t` among the top-level conjuncts, with `v` of unit coefficient.
fn unit_equality(f: &F, v: &str) -> Option<LinTerm> {
    let F::And(xs) = f else { return None };
    let geqs: Vec<&LinTerm> = xs
        .iter()
        .filter_map(|x| match x {
            F::Geq(t) if t.coeff(v).abs() == 1 => Some(t),
            _ => None,
        })
        .collect();
    for (i, a) in geqs.iter().enumerate() {
        for b in &geqs[i + 1..] {
            if a.plus(b) == LinTerm::default() {
                // a = c*v + s with c = +-1, so v = -s / c
                let c = a.coeff(v);
                let s = a.minus(&LinTerm::scaled_var(v, c));
                return Some(s.scale(-c));
            }
        }
    }
    None
}

/// Quantifier-free equivalent of `f` over ℕ₀.
pub fn eliminate(f: &PresburgerFormula) -> Result<PresburgerFormula, PresburgerError> {
    eliminate_with_budget(f, DEFAULT_FORMULA_BUDGET)
}

pub fn eliminate_with_budget(f: &PresburgerFormula, limit: usize) -> Result<PresburgerFormula, PresburgerError> {
    Eliminator { limit }.qe(f)
}

/// Truth of a sentence over ℕ₀.
pub fn decide(sentence: &PresburgerFormula) -> Result<bool, PresburgerError> {
    decide_with_budget(sentence, DEFAULT_FORMULA_BUDGET)
}

pub fn decide_with_budget(sentence: &PresburgerFormula, limit: usize) -> Result<bool, PresburgerError> {
    let free = sentence.free_vars();
    if !free.is_empty() {
        return Err(PresburgerError::NotASentence(free.into_iter().collect()));
    }
    match eliminate_with_budget(sentence, limit)? {
        F::Const(b) => Ok(b),
        other => Ok(other.eval(&|_: &str| None)?.expect("closed quantifier-free formula")),
    }
}

/// Outcome of comparing two number predicates as subsets of ℕ₀.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredComparison {
    pub equal: bool,
    /// Least `n` on which the predicates differ. Only reported for closed
    /// predicates.
    pub witness: Option<u64>,
}

/// Decides `FORALL n. p1(n) <-> p2(n)`. Free variables of the predicates are
/// universally quantified over ℕ₀ as well.
pub fn pred_equal(p1: &NumPredicate, p2: &NumPredicate) -> Result<PredComparison, PresburgerError> {
    let mut vars: BTreeSet<String> = p1.vars().into_iter().collect();
    vars.extend(p2.vars());
    let mut n = String::from("n");
    while vars.contains(&n) {
        n.push('\'');
    }
    let nt = LinTerm::var(n.clone());
    let body = F::iff(F::from_predicate(p1, &nt), F::from_predicate(p2, &nt));
    let sentence = vars.iter().fold(F::forall(n, body), |acc, v| F::forall(v.clone(), acc));
    let equal = decide(&sentence)?;
    let witness = if equal || !vars.is_empty() {
        None
    } else {
        // Both predicates are periodic with period lcm from their largest constant on.
        let top = p1.terms().into_iter().chain(p2.terms()).map(|t| t.constant_part().max(0)).max().unwrap_or(0);
        let period = lcm(p1.period(), p2.period()) as i64;
        (0..=top + period).find(|&k| p1.holds_closed(k) != p2.holds_closed(k)).map(|k| k as u64)
    };
    Ok(PredComparison { equal, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Pred;

    fn x() -> LinTerm {
        LinTerm::var("x")
    }

    fn y() -> LinTerm {
        LinTerm::var("y")
    }

    fn c(k: i64) -> LinTerm {
        LinTerm::constant(k)
    }

    #[test]
    fn successor_always_exists() {
        let f = F::exists("y", F::and(F::eq(&y(), &x().offset(1)), F::geq(&y(), &c(1))));
        let g = eliminate(&f).unwrap();
        assert!(g.is_quantifier_free());
        for v in 0..20 {
            assert_eq!(g.eval(&|_: &str| Some(v)).unwrap(), Some(true));
        }
    }

    #[test]
    fn contradictory_residues() {
        let f = F::exists("x", F::and(F::congruent(&x(), 1, 2), F::congruent(&x(), 0, 2)));
        assert_eq!(eliminate(&f).unwrap(), F::Const(false));
    }

    #[test]
    fn halving_gives_parity() {
        let f = F::exists("x", F::eq(&x().scale(2), &y()));
        let g = eliminate(&f).unwrap();
        assert!(g.is_quantifier_free());
        for v in 0..=10 {
            assert_eq!(g.eval(&|_: &str| Some(v)).unwrap(), Some(v % 2 == 0), "y = {v}");
        }
    }

    #[test]
    fn small_sentences() {
        assert!(decide(&F::forall("x", F::exists("y", F::geq(&y(), &x().offset(1))))).unwrap());
        assert!(!decide(&F::exists("x", F::and(F::geq(&x(), &c(3)), F::leq(&x(), &c(2))))).unwrap());
        let n = LinTerm::var("n");
        let lhs = F::and(F::geq(&n, &c(1)), F::congruent(&n, 0, 2));
        let rhs = F::and(F::geq(&n, &c(2)), F::congruent(&n, 0, 2));
        assert!(decide(&F::forall("n", F::iff(lhs, rhs))).unwrap());
        // quantifiers range over the naturals, not the integers
        assert!(!decide(&F::exists("x", F::leq(&x(), &c(-1)))).unwrap());
        assert!(decide(&F::forall("x", F::geq(&x(), &c(0)))).unwrap());
    }

    #[test]
    fn free_variables_are_rejected_by_decide() {
        assert_eq!(decide(&F::geq(&x(), &c(0))), Err(PresburgerError::NotASentence(vec!["x".into()])));
    }

    #[test]
    fn predicate_comparisons() {
        let even = Pred::Even.to_core();
        let odd = Pred::Odd.to_core();
        let r = pred_equal(&Pred::Mod(c(0), 2).to_core(), &Pred::not(Pred::Mod(c(1), 2)).to_core()).unwrap();
        assert_eq!(r, PredComparison { equal: true, witness: None });
        assert_eq!(pred_equal(&even, &odd).unwrap(), PredComparison { equal: false, witness: Some(0) });
        let a = NumPredicate::and(Pred::Ge(c(1)).to_core(), even.clone());
        let b = NumPredicate::and(Pred::Ge(c(2)).to_core(), even);
        assert!(pred_equal(&a, &b).unwrap().equal);
        let r = pred_equal(&Pred::Ge(c(3)).to_core(), &Pred::Gt(c(3)).to_core()).unwrap();
        assert_eq!(r.witness, Some(3));
    }

    #[test]
    fn open_predicates_are_compared_for_all_values() {
        let gt = Pred::Gt(LinTerm::var("i")).to_core();
        let ge = Pred::Ge(LinTerm::var("i").offset(1)).to_core();
        assert_eq!(pred_equal(&gt, &ge).unwrap(), PredComparison { equal: true, witness: None });
        let r = pred_equal(&gt, &Pred::Ge(LinTerm::var("i")).to_core()).unwrap();
        assert!(!r.equal && r.witness.is_none());
    }

    #[test]
    fn budget_is_enforced() {
        let f = F::exists("x", F::and(F::congruent(&x().scale(3), 1, 7), F::geq(&x(), &y())));
        assert!(matches!(eliminate_with_budget(&f, 3), Err(PresburgerError::BudgetExceeded { .. })));
    }

    #[test]
    fn display_is_readable() {
        let f = F::forall("x", F::or(F::geq(&x(), &c(2)), F::congruent(&x(), 1, 3)));
        assert_eq!(f.to_string(), "FORALL x. (x-2 >= 0 | 3 | x-1)");
    }
}
