//! Random surface expressions and a direct word-level reading of every sugar
//! form, independent of the desugaring code.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use nile::syntax::{Expr, LinTerm, Pred, Rel};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

const NAMES: &[&str] = &["i", "j", "x", "n", "k2", "count_a"];
const WORDS: &[&str] = &["a", "b", "ab", "ba", "abba", "eps", "mod", "EVEN", "c"];

fn random_term_any(rng: &mut StdRng) -> LinTerm {
    let mut t = LinTerm::constant(rng.gen_range(-20..40));
    for _ in 0..rng.gen_range(0..3) {
        let name = *NAMES.choose(rng).unwrap();
        t = t.plus(&LinTerm::scaled_var(name, rng.gen_range(-4..5)));
    }
    t
}

pub fn random_pred_any(rng: &mut StdRng, depth: u32) -> Pred {
    let top = if depth == 0 { 8 } else { 11 };
    match rng.gen_range(0..top) {
        0 => Pred::Eq(random_term_any(rng)),
        1 => Pred::Ge(random_term_any(rng)),
        2 => Pred::Gt(random_term_any(rng)),
        3 => Pred::Le(random_term_any(rng)),
        4 => Pred::Lt(random_term_any(rng)),
        5 => Pred::Mod(random_term_any(rng), rng.gen_range(1..7)),
        6 => Pred::Even,
        7 => Pred::Odd,
        8 => Pred::not(random_pred_any(rng, depth - 1)),
        9 => Pred::and(random_pred_any(rng, depth - 1), random_pred_any(rng, depth - 1)),
        _ => Pred::or(random_pred_any(rng, depth - 1), random_pred_any(rng, depth - 1)),
    }
}

/// Syntactically arbitrary surface tree (not necessarily valid or closed).
pub fn random_surface(rng: &mut StdRng, depth: u32) -> Expr {
    let b = |rng: &mut StdRng| Box::new(random_surface(rng, depth.saturating_sub(1)));
    let opt_pred = |rng: &mut StdRng| if rng.gen_bool(0.5) { Some(random_pred_any(rng, 1)) } else { None };
    if depth == 0 || rng.gen_ratio(1, 6) {
        return match rng.gen_range(0..7) {
            0 => Expr::Top,
            1 => Expr::Bot,
            2 => Expr::eps(),
            3 => Expr::Palindrome,
            4 => Expr::StrVar(NAMES.choose(rng).unwrap().to_string()),
            5 => Expr::Len(random_pred_any(rng, 1)),
            _ => Expr::atom(*WORDS.choose(rng).unwrap()),
        };
    }
    match rng.gen_range(0..22) {
        0 => Expr::Not(b(rng)),
        1 => Expr::And(b(rng), b(rng)),
        2 => Expr::Or(b(rng), b(rng)),
        3 => Expr::Implies(b(rng), b(rng)),
        4 => Expr::Iff(b(rng), b(rng)),
        5 => Expr::Concat(b(rng), b(rng)),
        6 => Expr::Rep(opt_pred(rng), b(rng)),
        7 => Expr::Has(opt_pred(rng), b(rng)),
        8 => Expr::Begin(opt_pred(rng), b(rng)),
        9 => Expr::End(opt_pred(rng), b(rng)),
        10 => {
            let mut syms: Vec<char> = "abcxyz".chars().collect();
            syms.shuffle(rng);
            syms.truncate(rng.gen_range(1..4));
            Expr::Alph(syms, b(rng))
        }
        11 => Expr::Alternate(b(rng), b(rng)),
        12 => Expr::Cons((0..rng.gen_range(1..4)).map(|_| (random_pred_any(rng, 1), *b(rng))).collect()),
        13 => Expr::Range(random_term_any(rng), random_term_any(rng), b(rng)),
        14 => Expr::At(random_term_any(rng), b(rng)),
        15 => Expr::CountCmp {
            lhs_coeff: rng.gen_range(1..4),
            lhs: b(rng),
            rel: *[Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt].choose(rng).unwrap(),
            rhs_coeff: rng.gen_range(1..4),
            rhs: b(rng),
        },
        16 => Expr::ExistsNum(NAMES.choose(rng).unwrap().to_string(), b(rng)),
        17 => Expr::ForallNum(NAMES.choose(rng).unwrap().to_string(), b(rng)),
        18 => Expr::ExistsStr(NAMES.choose(rng).unwrap().to_string(), b(rng)),
        19 => Expr::Reverse(b(rng)),
        _ => Expr::Concat(b(rng), b(rng)),
    }
}

fn small_closed_pred(rng: &mut StdRng, var: Option<&str>) -> Pred {
    let term = |rng: &mut StdRng| {
        let t = LinTerm::constant(rng.gen_range(-1..4));
        match var {
            Some(v) if rng.gen_bool(0.6) => t.plus(&LinTerm::scaled_var(v, rng.gen_range(1..3))),
            _ => t,
        }
    };
    match rng.gen_range(0..10) {
        0 => Pred::Eq(term(rng)),
        1 => Pred::Ge(term(rng)),
        2 => Pred::Gt(term(rng)),
        3 => Pred::Le(term(rng)),
        4 => Pred::Lt(term(rng)),
        5 => Pred::Mod(term(rng), rng.gen_range(1..4)),
        6 => Pred::Even,
        7 => Pred::Odd,
        8 => Pred::not(small_closed_pred(rng, var)),
        _ => Pred::and(small_closed_pred(rng, var), small_closed_pred(rng, var)),
    }
}

fn small_leaf(rng: &mut StdRng) -> Expr {
    Expr::atom(*["", "a", "b", "ab", "ba", "aa"].choose(rng).unwrap())
}

/// Small regular sub-expression used as the argument of a sugar form.
fn small_arg(rng: &mut StdRng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.4) {
        return small_leaf(rng);
    }
    match rng.gen_range(0..5) {
        0 => Expr::or(small_arg(rng, depth - 1), small_arg(rng, depth - 1)),
        1 => Expr::concat(small_arg(rng, depth - 1), small_arg(rng, depth - 1)),
        2 => Expr::not(small_arg(rng, depth - 1)),
        3 => Expr::rep(None, small_arg(rng, depth - 1)),
        _ => Expr::has(None, small_arg(rng, depth - 1)),
    }
}

/// A closed, valid surface expression over {a, b} whose root is a sugar form.
pub fn random_sugar(rng: &mut StdRng) -> Expr {
    let arg = |rng: &mut StdRng| Box::new(small_arg(rng, 2));
    let opt = |rng: &mut StdRng| if rng.gen_bool(0.3) { None } else { Some(small_closed_pred(rng, None)) };
    match rng.gen_range(0..17) {
        0 => Expr::Top,
        1 => Expr::Bot,
        2 => Expr::And(arg(rng), arg(rng)),
        3 => Expr::Implies(arg(rng), arg(rng)),
        4 => Expr::Iff(arg(rng), arg(rng)),
        5 => Expr::Rep(None, arg(rng)),
        6 => Expr::Has(opt(rng), arg(rng)),
        7 => Expr::Begin(opt(rng), arg(rng)),
        8 => Expr::End(opt(rng), arg(rng)),
        9 => Expr::Len(small_closed_pred(rng, None)),
        10 => {
            let syms = [vec!['a'], vec!['b'], vec!['a', 'b']].choose(rng).unwrap().clone();
            Expr::Alph(syms, arg(rng))
        }
        11 => Expr::Alternate(arg(rng), arg(rng)),
        12 => Expr::Cons((0..rng.gen_range(1..3)).map(|_| (small_closed_pred(rng, None), small_arg(rng, 1))).collect()),
        13 => {
            let i = rng.gen_range(0..6);
            Expr::Range(LinTerm::constant(i), LinTerm::constant(i + rng.gen_range(0..4)), arg(rng))
        }
        14 => match rng.gen_range(0..3) {
            0 => Expr::At(LinTerm::constant(rng.gen_range(0..7)), arg(rng)),
            1 => Expr::Palindrome,
            _ => Expr::Reverse(arg(rng)),
        },
        15 => Expr::CountCmp {
            lhs_coeff: rng.gen_range(1..4),
            lhs: Box::new(small_arg(rng, 1)),
            rel: *[Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt].choose(rng).unwrap(),
            rhs_coeff: rng.gen_range(1..4),
            rhs: Box::new(small_arg(rng, 1)),
        },
        _ => {
            let body =
                Expr::concat(small_arg(rng, 1), Expr::rep(Some(small_closed_pred(rng, Some("i"))), small_arg(rng, 1)));
            if rng.gen_bool(0.5) {
                Expr::exists("i", body)
            } else {
                Expr::ForallNum("i".into(), Box::new(body))
            }
        }
    }
}

/// Word-level semantics of surface expressions, read off the informal
/// meaning of each construct rather than from its core expansion.
pub struct SurfaceRef {
    pub sigma: Vec<u8>,
    pub num_bound: i64,
    memo: RefCell<HashMap<(usize, Vec<u8>, Vec<(String, i64)>), bool>>,
}

impl SurfaceRef {
    pub fn new(sigma: &[u8], num_bound: i64) -> Self {
        SurfaceRef { sigma: sigma.to_vec(), num_bound, memo: RefCell::default() }
    }

    pub fn holds(&self, e: &Expr, w: &str) -> bool {
        self.sat(e, w.as_bytes(), &BTreeMap::new())
    }

    fn pred(p: &Pred, n: i64, env: &BTreeMap<String, i64>) -> bool {
        let t = |t: &LinTerm| t.eval(|v: &str| env.get(v).copied()).unwrap();
        match p {
            Pred::Eq(x) => n == t(x),
            Pred::Ge(x) => n >= t(x),
            Pred::Gt(x) => n > t(x),
            Pred::Le(x) => n <= t(x),
            Pred::Lt(x) => n < t(x),
            Pred::Mod(x, m) => (n - t(x)).rem_euclid(*m as i64) == 0,
            Pred::Even => n % 2 == 0,
            Pred::Odd => n % 2 == 1,
            Pred::Not(a) => !Self::pred(a, n, env),
            Pred::And(a, b) => Self::pred(a, n, env) && Self::pred(b, n, env),
            Pred::Or(a, b) => Self::pred(a, n, env) || Self::pred(b, n, env),
        }
    }

    /// Every way to cut `s` into consecutive `e`-matches, as piece counts.
    /// Counts above |s| only arise with empty pieces and are capped.
    fn piece_counts(&self, e: &Expr, s: &[u8], env: &BTreeMap<String, i64>) -> Vec<bool> {
        let n = s.len();
        let cap = n + 1;
        // reach[k][i]: prefix s[..i] splits into exactly k pieces
        let mut reach = vec![vec![false; n + 1]; cap + 1];
        reach[0][0] = true;
        for k in 0..cap {
            for i in 0..=n {
                if reach[k][i] {
                    for q in i..=n {
                        if self.sat(e, &s[i..q], env) {
                            reach[k + 1][q] = true;
                        }
                    }
                }
            }
        }
        (0..=cap).map(|k| reach[k][n]).collect()
    }

    /// Some count `n` of consecutive pieces satisfies `p`; with empty pieces
    /// available every count past the cap behaves like the cap.
    fn some_count(&self, p: &Pred, counts: &[bool], eps: bool, env: &BTreeMap<String, i64>) -> bool {
        let cap = counts.len() - 1;
        if counts.iter().enumerate().any(|(k, &ok)| ok && Self::pred(p, k as i64, env)) {
            return true;
        }
        eps && counts[cap] && (cap as i64..cap as i64 + 200 + 4 * self.num_bound).any(|k| Self::pred(p, k, env))
    }

    fn occurrences(&self, e: &Expr, s: &[u8], env: &BTreeMap<String, i64>) -> i64 {
        (0..=s.len()).filter(|&i| (i..=s.len()).any(|q| self.sat(e, &s[i..q], env))).count() as i64
    }

    fn sat(&self, e: &Expr, s: &[u8], env: &BTreeMap<String, i64>) -> bool {
        let key = (e as *const Expr as usize, s.to_vec(), env.iter().map(|(k, v)| (k.clone(), *v)).collect());
        if let Some(v) = self.memo.borrow().get(&key) {
            return *v;
        }
        let v = self.sat_inner(e, s, env);
        self.memo.borrow_mut().insert(key, v);
        v
    }

    fn sat_inner(&self, e: &Expr, s: &[u8], env: &BTreeMap<String, i64>) -> bool {
        let any_split =
            |a: &Expr, b: &Expr| (0..=s.len()).any(|k| self.sat(a, &s[..k], env) && self.sat(b, &s[k..], env));
        match e {
            Expr::Atom(w) => w.as_bytes() == s,
            Expr::Top => true,
            Expr::Bot => false,
            Expr::Not(a) => !self.sat(a, s, env),
            Expr::And(a, b) => self.sat(a, s, env) && self.sat(b, s, env),
            Expr::Or(a, b) => self.sat(a, s, env) || self.sat(b, s, env),
            Expr::Implies(a, b) => !self.sat(a, s, env) || self.sat(b, s, env),
            Expr::Iff(a, b) => self.sat(a, s, env) == self.sat(b, s, env),
            Expr::Concat(a, b) => any_split(a, b),
            Expr::Rep(p, a) => {
                let counts = self.piece_counts(a, s, env);
                let eps = self.sat(a, &[], env);
                self.some_count(p.as_ref().unwrap_or(&Pred::Ge(LinTerm::constant(0))), &counts, eps, env)
            }
            Expr::Has(p, a) => {
                let n = self.occurrences(a, s, env);
                Self::pred(p.as_ref().unwrap_or(&Pred::Ge(LinTerm::constant(1))), n, env)
            }
            // A run of pieces at the start, not followed by another piece.
            Expr::Begin(p, a) => {
                let p = p.clone().unwrap_or(Pred::Ge(LinTerm::constant(1)));
                let eps = self.sat(a, &[], env);
                (0..=s.len()).any(|k| {
                    let rest = &s[k..];
                    let stops = rest.is_empty() || !(0..=rest.len()).any(|q| self.sat(a, &rest[..q], env));
                    stops && self.some_count(&p, &self.piece_counts(a, &s[..k], env), eps, env)
                })
            }
            Expr::End(p, a) => {
                let p = p.clone().unwrap_or(Pred::Ge(LinTerm::constant(1)));
                let eps = self.sat(a, &[], env);
                (0..=s.len()).any(|k| {
                    let head = &s[..k];
                    let stops = head.is_empty() || !(0..=head.len()).any(|q| self.sat(a, &head[q..], env));
                    stops && self.some_count(&p, &self.piece_counts(a, &s[k..], env), eps, env)
                })
            }
            Expr::Len(p) => Self::pred(p, s.len() as i64, env),
            Expr::Alph(syms, a) => s.iter().all(|c| syms.contains(&(*c as char))) && self.sat(a, s, env),
            Expr::Alternate(a, b) => {
                // ends[i][t]: s[..i] is a nonempty alternating sequence whose
                // last piece matches `a` (t = 0) or `b` (t = 1)
                let n = s.len();
                let mut ends = vec![[false; 2]; n + 1];
                let mut changed = true;
                while changed {
                    changed = false;
                    for i in 0..=n {
                        for q in i..=n {
                            for (t, part) in [(0, a), (1, b)] {
                                let start = i == 0 || ends[i][1 - t];
                                if start && !ends[q][t] && self.sat(part, &s[i..q], env) {
                                    ends[q][t] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
                n == 0 || ends[n][0] || ends[n][1]
            }
            Expr::Cons(items) => {
                let n = s.len();
                let mut reach = vec![false; n + 1];
                reach[0] = true;
                for i in 0..n {
                    if reach[i] {
                        for q in i + 1..=n {
                            if items.iter().any(|(_, e)| self.sat(e, &s[i..q], env)) {
                                reach[q] = true;
                            }
                        }
                    }
                }
                reach[n] && items.iter().all(|(p, e)| Self::pred(p, self.occurrences(e, s, env), env))
            }
            Expr::Range(i, j, a) => {
                let t = |t: &LinTerm| t.eval(|v: &str| env.get(v).copied()).unwrap();
                let (from, to) = (t(i) - 1, t(j));
                from >= 0 && from <= to && to <= s.len() as i64 && self.sat(a, &s[from as usize..to as usize], env)
            }
            Expr::At(i, a) => {
                let k = i.eval(|v: &str| env.get(v).copied()).unwrap();
                k >= 1 && k as usize <= s.len() && self.sat(a, &s[k as usize - 1..k as usize], env)
            }
            Expr::CountCmp { lhs_coeff, lhs, rel, rhs_coeff, rhs } => rel.holds(
                *lhs_coeff as i64 * self.occurrences(lhs, s, env),
                *rhs_coeff as i64 * self.occurrences(rhs, s, env),
            ),
            Expr::ExistsNum(v, a) => (0..=self.num_bound).any(|x| {
                let mut inner = env.clone();
                inner.insert(v.clone(), x);
                self.sat(a, s, &inner)
            }),
            Expr::ForallNum(v, a) => (0..=self.num_bound).all(|x| {
                let mut inner = env.clone();
                inner.insert(v.clone(), x);
                self.sat(a, s, &inner)
            }),
            Expr::Reverse(a) => {
                let r: Vec<u8> = s.iter().rev().copied().collect();
                self.sat(a, &r, env)
            }
            Expr::Palindrome => s.iter().eq(s.iter().rev()),
            Expr::ExistsStr(..) | Expr::StrVar(_) => unimplemented!("string variables are not generated"),
        }
    }
}
