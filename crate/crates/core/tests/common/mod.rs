//! Shared helpers for integration tests: random expression generators and a
//! naive reference evaluator written directly from the membership definitions.
#![allow(dead_code)]

pub mod presburger;
pub mod surface;
pub mod trees;

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use nile::syntax::{Alphabet, CoreExpr, LinTerm, NumPredicate};
use rand::rngs::StdRng;
use rand::Rng;

pub fn ab() -> Alphabet {
    Alphabet::parse_list("a,b").unwrap()
}

pub fn words(sigma: &Alphabet, max_len: usize) -> Vec<String> {
    sigma.words_up_to(max_len)
}

const ATOMS: &[&str] = &["", "a", "b", "ab", "ba", "aa"];

pub fn random_closed_pred(rng: &mut StdRng, depth: u32) -> NumPredicate {
    let choice = if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..5) };
    match choice {
        0 => NumPredicate::Geq(LinTerm::constant(rng.gen_range(-1..5))),
        1 => NumPredicate::Cong(LinTerm::constant(rng.gen_range(-1..3)), rng.gen_range(1..4)),
        2 => NumPredicate::not(random_closed_pred(rng, depth - 1)),
        3 => NumPredicate::and(random_closed_pred(rng, depth - 1), random_closed_pred(rng, depth - 1)),
        _ => NumPredicate::or(random_closed_pred(rng, depth - 1), random_closed_pred(rng, depth - 1)),
    }
}

/// Random expression without quantifiers; `reverse` enables REVERSE nodes.
pub fn random_regular(rng: &mut StdRng, depth: u32, reverse: bool) -> CoreExpr {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return CoreExpr::atom(ATOMS[rng.gen_range(0..ATOMS.len())]);
    }
    let d = depth - 1;
    match rng.gen_range(0..if reverse { 6 } else { 5 }) {
        0 => CoreExpr::not(random_regular(rng, d, reverse)),
        1 => CoreExpr::or(random_regular(rng, d, reverse), random_regular(rng, d, reverse)),
        2 => CoreExpr::concat(random_regular(rng, d, reverse), random_regular(rng, d, reverse)),
        3 => CoreExpr::rep(random_closed_pred(rng, 1), random_regular(rng, d, reverse)),
        4 => CoreExpr::has(random_closed_pred(rng, 1), random_regular(rng, d, reverse)),
        _ => CoreExpr::Reverse(Box::new(random_regular(rng, d, reverse))),
    }
}

fn random_term(rng: &mut StdRng, vars: &[String]) -> LinTerm {
    let mut t = LinTerm::constant(rng.gen_range(-2..3));
    for v in vars {
        if rng.gen_ratio(2, 3) {
            t = t.plus(&LinTerm::scaled_var(v.clone(), [-1, 1, 1, 2][rng.gen_range(0..4)]));
        }
    }
    t
}

fn random_open_pred(rng: &mut StdRng, vars: &[String], depth: u32) -> NumPredicate {
    let choice = if depth == 0 { rng.gen_range(0..3) } else { rng.gen_range(0..6) };
    match choice {
        0 | 1 => NumPredicate::Geq(random_term(rng, vars)),
        2 => NumPredicate::Cong(random_term(rng, vars), rng.gen_range(1..4)),
        3 => NumPredicate::not(random_open_pred(rng, vars, depth - 1)),
        4 => NumPredicate::and(random_open_pred(rng, vars, depth - 1), random_open_pred(rng, vars, depth - 1)),
        _ => NumPredicate::or(random_open_pred(rng, vars, depth - 1), random_open_pred(rng, vars, depth - 1)),
    }
}

/// Random closed expression `∃x body` with a single number quantifier.
pub fn random_quantified(rng: &mut StdRng, depth: u32) -> CoreExpr {
    let body = random_quantified_body(rng, depth, &["x".to_string()]);
    CoreExpr::exists("x", body)
}

/// Random closed expression with a second quantifier `∃y` inside `∃x`.
pub fn random_nested(rng: &mut StdRng, depth: u32) -> CoreExpr {
    let both = ["x".to_string(), "y".to_string()];
    let inner = CoreExpr::exists("y", random_quantified_body(rng, depth, &both));
    let body = match rng.gen_range(0..3) {
        0 => inner,
        1 => CoreExpr::concat(random_quantified_body(rng, depth - 1, &both[..1]), inner),
        _ => CoreExpr::not(inner),
    };
    CoreExpr::exists("x", body)
}

fn random_quantified_body(rng: &mut StdRng, depth: u32, vars: &[String]) -> CoreExpr {
    if depth == 0 || rng.gen_ratio(1, 5) {
        let child = CoreExpr::atom(ATOMS[rng.gen_range(1..ATOMS.len())]);
        return if rng.gen_bool(0.5) {
            CoreExpr::rep(random_open_pred(rng, vars, 0), child)
        } else {
            CoreExpr::has(random_open_pred(rng, vars, 0), child)
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..6) {
        0 => CoreExpr::not(random_quantified_body(rng, d, vars)),
        1 => CoreExpr::or(random_quantified_body(rng, d, vars), random_quantified_body(rng, d, vars)),
        2 => CoreExpr::concat(random_quantified_body(rng, d, vars), random_quantified_body(rng, d, vars)),
        3 => CoreExpr::rep(random_open_pred(rng, vars, 0), random_quantified_body(rng, d, vars)),
        4 => CoreExpr::has(random_open_pred(rng, vars, 0), random_quantified_body(rng, d, vars)),
        _ => {
            CoreExpr::concat(CoreExpr::atom(ATOMS[rng.gen_range(0..ATOMS.len())]), random_quantified_body(rng, d, vars))
        }
    }
}

/// Naive membership straight from the definitions. Number quantifiers try
/// every value up to `num_bound`; string quantifiers try every word over the
/// alphabet up to `max_str_len`.
///
/// The memo is keyed by segment content and by the values of free variables,
/// so it stays valid across words. A `Reference` must only be used with a
/// single expression because free variables are cached per node address.
pub struct Reference<'a> {
    pub sigma: &'a Alphabet,
    pub num_bound: i64,
    pub max_str_len: usize,
    memo: RefCell<HashMap<MemoKey, bool>>,
    powers: RefCell<HashMap<(MemoKey, usize), bool>>,
    free: RefCell<HashMap<usize, (Vec<String>, Vec<String>)>>,
}

/// Node address, encoded segment, free number values, encoded free strings.
type MemoKey = (usize, u64, [i64; 3], [u64; 2]);

type Nums = BTreeMap<String, i64>;
type Strs = BTreeMap<String, Vec<u8>>;

impl<'a> Reference<'a> {
    pub fn new(sigma: &'a Alphabet, num_bound: i64, max_str_len: usize) -> Self {
        Reference {
            sigma,
            num_bound,
            max_str_len,
            memo: RefCell::default(),
            powers: RefCell::default(),
            free: RefCell::default(),
        }
    }

    pub fn holds(&self, e: &CoreExpr, w: &str) -> bool {
        self.sat(e, w.as_bytes(), &mut BTreeMap::new(), &mut BTreeMap::new())
    }

    /// Injective while words stay short: symbols are digits in base |Σ|+1.
    fn encode(&self, s: &[u8]) -> u64 {
        let base = self.sigma.len() as u64 + 1;
        s.iter().fold(0u64, |acc, &c| {
            let digit = self.sigma.index_of(c).map_or(0, |i| i as u64 + 1);
            acc.checked_mul(base).and_then(|a| a.checked_add(digit)).expect("segment too long to encode")
        })
    }

    fn key(&self, e: &CoreExpr, s: &[u8], nums: &Nums, strs: &Strs) -> MemoKey {
        let ptr = e as *const CoreExpr as usize;
        let mut free = self.free.borrow_mut();
        let (fn_, fs) = free.entry(ptr).or_insert_with(|| {
            let (n, s) = e.free_vars();
            (n.into_iter().collect(), s.into_iter().collect())
        });
        let mut num_vals = [i64::MIN; 3];
        for (slot, v) in num_vals.iter_mut().zip(fn_.iter()) {
            *slot = nums.get(v).copied().unwrap_or(i64::MIN);
        }
        let mut str_vals = [u64::MAX; 2];
        for (slot, v) in str_vals.iter_mut().zip(fs.iter()) {
            *slot = strs.get(v).map_or(u64::MAX, |x| self.encode(x));
        }
        assert!(fn_.len() <= 3 && fs.len() <= 2, "too many free variables for the reference");
        (ptr, self.encode(s), num_vals, str_vals)
    }

    fn sat(&self, e: &CoreExpr, s: &[u8], nums: &mut Nums, strs: &mut Strs) -> bool {
        let key = self.key(e, s, nums, strs);
        if let Some(v) = self.memo.borrow().get(&key) {
            return *v;
        }
        let v = self.sat_inner(e, s, nums, strs);
        self.memo.borrow_mut().insert(key, v);
        v
    }

    fn lookup(nums: &Nums) -> impl Fn(&str) -> Option<i64> + '_ {
        move |v: &str| nums.get(v).copied()
    }

    fn sat_inner(&self, e: &CoreExpr, s: &[u8], nums: &mut Nums, strs: &mut Strs) -> bool {
        match e {
            CoreExpr::Atom(a) => a.as_bytes() == s,
            CoreExpr::Not(a) => !self.sat(a, s, nums, strs),
            CoreExpr::Or(a, b) => self.sat(a, s, nums, strs) || self.sat(b, s, nums, strs),
            CoreExpr::Concat(a, b) => {
                (0..=s.len()).any(|k| self.sat(a, &s[..k], nums, strs) && self.sat(b, &s[k..], nums, strs))
            }
            CoreExpr::Rep(p, a) => {
                let len = s.len() as i64;
                let holds = |n: i64, nums: &Nums| p.holds(n, &Self::lookup(nums)).unwrap();
                if (0..=len).any(|n| holds(n, nums) && self.power(a, s, n as usize, nums, strs)) {
                    return true;
                }
                // More than |s| pieces need empty pieces, and then any count
                // above |s| works as well as |s| itself. Past every threshold
                // the predicate repeats with its period, so a window of one
                // period after each threshold covers all counts.
                if !self.sat(a, &[], nums, strs) || !self.power(a, s, s.len(), nums, strs) {
                    return false;
                }
                let period = p.period() as i64;
                let mut starts = vec![len + 1];
                for t in p.terms() {
                    starts.push(t.eval(Self::lookup(nums)).unwrap());
                }
                starts.iter().any(|&t| (t.max(len + 1)..t.max(len + 1) + period + 1).any(|n| holds(n, nums)))
            }
            CoreExpr::Has(p, a) => {
                let count =
                    (0..=s.len()).filter(|&i| (i..=s.len()).any(|q| self.sat(a, &s[i..q], nums, strs))).count() as i64;
                p.holds(count, &Self::lookup(nums)).unwrap()
            }
            CoreExpr::ExistsNum(v, body) => {
                let saved = nums.get(v).copied();
                let mut found = false;
                for x in 0..=self.num_bound {
                    nums.insert(v.clone(), x);
                    if self.sat(body, s, nums, strs) {
                        found = true;
                        break;
                    }
                }
                match saved {
                    Some(x) => nums.insert(v.clone(), x),
                    None => nums.remove(v),
                };
                found
            }
            CoreExpr::ExistsStr(v, body) => {
                let saved = strs.get(v).cloned();
                let mut found = false;
                for cand in self.sigma.words_up_to(self.max_str_len) {
                    strs.insert(v.clone(), cand.into_bytes());
                    if self.sat(body, s, nums, strs) {
                        found = true;
                        break;
                    }
                }
                match saved {
                    Some(x) => strs.insert(v.clone(), x),
                    None => strs.remove(v),
                };
                found
            }
            CoreExpr::StrVar(v) => strs.get(v).map(|x| x.as_slice() == s).unwrap_or(false),
            CoreExpr::Reverse(a) => {
                let r: Vec<u8> = s.iter().rev().copied().collect();
                self.sat(a, &r, nums, strs)
            }
        }
    }

    /// `s` splits into exactly `n` consecutive matches of `a`.
    fn power(&self, a: &CoreExpr, s: &[u8], n: usize, nums: &mut Nums, strs: &mut Strs) -> bool {
        if n == 0 {
            return s.is_empty();
        }
        let key = (self.key(a, s, nums, strs), n);
        if let Some(v) = self.powers.borrow().get(&key) {
            return *v;
        }
        let v = (0..=s.len()).any(|k| self.sat(a, &s[..k], nums, strs) && self.power(a, &s[k..], n - 1, nums, strs));
        self.powers.borrow_mut().insert(key, v);
        v
    }
}
