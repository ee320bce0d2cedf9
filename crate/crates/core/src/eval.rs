//! Membership checking `w |= e` by memoized structural recursion.
//!
//! Expressions are lowered to an arena of nodes whose variables are resolved
//! to environment slots. A sub-result is memoized on the node, the segment
//! `[i, j)` of the current view of the word (forward or reversed), and the
//! values of exactly those variables the node depends on.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{lcm, Alphabet, CoreExpr, Interpretation, LinTerm, NumPredicate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("evaluation budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("symbol {0:?} is not in the alphabet")]
    SymbolNotInAlphabet(char),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalBudget {
    /// Maximum number of non-memoized node evaluations.
    pub max_steps: u64,
    /// Largest witness value a number quantifier may be asked to try.
    pub max_witness: u64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { max_steps: 50_000_000, max_witness: 100_000 }
    }
}

/// Achievable repetition counts: `finite` plus, if present, every `n >= tail_from`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CountSet {
    pub finite: BTreeSet<u64>,
    pub tail_from: Option<u64>,
}

impl CountSet {
    pub fn contains(&self, n: u64) -> bool {
        self.finite.contains(&n) || self.tail_from.is_some_and(|t| n >= t)
    }

    pub fn is_empty(&self) -> bool {
        self.finite.is_empty() && self.tail_from.is_none()
    }

    /// Whether some member satisfies `pred` under `lookup`.
    pub fn satisfies<F>(&self, pred: &NumPredicate, lookup: &F) -> Option<bool>
    where
        F: Fn(&str) -> Option<i64>,
    {
        for &n in &self.finite {
            if pred.holds(n as i64, lookup)? {
                return Some(true);
            }
        }
        let Some(start) = self.tail_from else { return Some(false) };
        let mut starts = vec![start as i64];
        for t in geq_terms(pred) {
            let v = t.eval(lookup)?;
            if v > start as i64 {
                starts.push(v);
            }
        }
        let m = pred.period() as i64;
        for s in starts {
            for n in s..s + m {
                if pred.holds(n, lookup)? {
                    return Some(true);
                }
            }
        }
        Some(false)
    }
}

fn geq_terms(p: &NumPredicate) -> Vec<&LinTerm> {
    match p {
        NumPredicate::Geq(t) => vec![t],
        NumPredicate::Cong(..) => vec![],
        NumPredicate::Not(a) => geq_terms(a),
        NumPredicate::And(a, b) | NumPredicate::Or(a, b) => {
            let mut v = geq_terms(a);
            v.extend(geq_terms(b));
            v
        }
    }
}

/// Sum of `|d|` and `|c_i|` over every term of `e`.
pub fn term_magnitude(e: &CoreExpr) -> u64 {
    e.predicates().iter().flat_map(|p| p.terms()).map(LinTerm::magnitude).sum()
}

/// Least common multiple of all moduli in `e` (1 if there are none).
pub fn modulus_lcm(e: &CoreExpr) -> u64 {
    e.predicates().iter().flat_map(|p| p.moduli()).fold(1, lcm)
}

/// Search bound for number quantifiers: `(len + 1 + Cmax) * M + Cmax`.
pub fn witness_bound(e: &CoreExpr, len: usize) -> u64 {
    let c = term_magnitude(e);
    let m = modulus_lcm(e);
    (len as u64 + 1 + c) * m + c
}

/// Decides `w |= e` under `beta`.
pub fn eval(
    e: &CoreExpr,
    w: &str,
    beta: &Interpretation,
    sigma: &Alphabet,
    budget: &EvalBudget,
) -> Result<bool, EvalError> {
    Evaluator::new(e, sigma).eval(w, beta, budget).map(|o| o.value)
}

/// Repetition counts `{n : segment |= phi^n}`.
pub fn achievable_counts(
    phi: &CoreExpr,
    segment: &str,
    beta: &Interpretation,
    sigma: &Alphabet,
) -> Result<CountSet, EvalError> {
    let ev = Evaluator::new(phi, sigma);
    let mut run = ev.start(segment, beta, &EvalBudget::default())?;
    let n = run.word.len();
    run.counts(ev.root, 0, n, false)
}

/// Occurrence positions (1-based): starts `i` whose suffix matches `phi . TOP`.
pub fn occurrence_positions(
    phi: &CoreExpr,
    w: &str,
    beta: &Interpretation,
    sigma: &Alphabet,
) -> Result<BTreeSet<usize>, EvalError> {
    let ev = Evaluator::new(phi, sigma);
    let mut run = ev.start(w, beta, &EvalBudget::default())?;
    let n = run.word.len();
    let mut out = BTreeSet::new();
    for p in 0..=n {
        if run.matches_prefix(ev.root, p, n, false)? {
            out.insert(p + 1);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub value: bool,
    /// Non-memoized node evaluations performed.
    pub steps: u64,
}

type NodeId = usize;
type Slot = usize;

#[derive(Clone, Debug)]
struct SlotTerm {
    constant: i64,
    coeffs: Vec<(Slot, i64)>,
}

impl SlotTerm {
    fn eval(&self, env: &[i64]) -> i64 {
        self.constant + self.coeffs.iter().map(|(s, c)| c * env[*s]).sum::<i64>()
    }
}

#[derive(Clone, Debug)]
enum SlotPred {
    Geq(SlotTerm),
    Cong(SlotTerm, i64),
    Not(Box<SlotPred>),
    And(Box<SlotPred>, Box<SlotPred>),
    Or(Box<SlotPred>, Box<SlotPred>),
}

impl SlotPred {
    fn holds(&self, n: i64, env: &[i64]) -> bool {
        match self {
            SlotPred::Geq(t) => n >= t.eval(env),
            SlotPred::Cong(t, m) => (n - t.eval(env)).rem_euclid(*m) == 0,
            SlotPred::Not(p) => !p.holds(n, env),
            SlotPred::And(a, b) => a.holds(n, env) && b.holds(n, env),
            SlotPred::Or(a, b) => a.holds(n, env) || b.holds(n, env),
        }
    }

    fn thresholds(&self, env: &[i64], out: &mut Vec<i64>) {
        match self {
            SlotPred::Geq(t) => out.push(t.eval(env)),
            SlotPred::Cong(..) => {}
            SlotPred::Not(p) => p.thresholds(env, out),
            SlotPred::And(a, b) | SlotPred::Or(a, b) => {
                a.thresholds(env, out);
                b.thresholds(env, out);
            }
        }
    }

    fn satisfied_by(&self, set: &CountSet, period: i64, env: &[i64]) -> bool {
        if set.finite.iter().any(|&n| self.holds(n as i64, env)) {
            return true;
        }
        let Some(start) = set.tail_from else { return false };
        let start = start as i64;
        let mut starts = vec![start];
        let mut ts = Vec::new();
        self.thresholds(env, &mut ts);
        starts.extend(ts.into_iter().filter(|&t| t > start));
        starts.iter().any(|&s| (s..s + period).any(|n| self.holds(n, env)))
    }
}

/// An atom of a quantifier body, split for the witness search bound.
#[derive(Clone, Debug)]
struct BoundAtom {
    own: i64,
    constant: i64,
    outer: Vec<(Slot, i64)>,
    geq: bool,
}

#[derive(Clone, Debug)]
enum Node {
    Atom(Vec<u8>),
    Not(NodeId),
    Or(NodeId, NodeId),
    Concat(NodeId, NodeId),
    Rep(SlotPred, i64, NodeId),
    Has(SlotPred, NodeId),
    ExistsNum { slot: Slot, body: NodeId, atoms: Vec<BoundAtom>, period: i64 },
    ExistsStr(Slot, NodeId),
    StrVar(Slot),
    Reverse(NodeId),
}

/// A compiled expression that can be evaluated against many words.
#[derive(Clone, Debug)]
pub struct Evaluator {
    nodes: Vec<Node>,
    deps: Vec<Vec<Slot>>,
    root: NodeId,
    slots: usize,
    free_nums: Vec<(String, Slot)>,
    free_strs: Vec<(String, Slot)>,
    sigma: Alphabet,
}

struct Builder {
    nodes: Vec<Node>,
    deps: Vec<Vec<Slot>>,
    scope: Vec<(String, bool, Slot)>,
    slots: usize,
    free_nums: BTreeMap<String, Slot>,
    free_strs: BTreeMap<String, Slot>,
}

impl Builder {
    fn lookup(&mut self, name: &str, is_str: bool) -> Slot {
        if let Some((_, _, s)) = self.scope.iter().rev().find(|(n, k, _)| n == name && *k == is_str) {
            return *s;
        }
        let free = if is_str { &mut self.free_strs } else { &mut self.free_nums };
        if let Some(s) = free.get(name) {
            return *s;
        }
        let s = self.slots;
        self.slots += 1;
        free.insert(name.to_string(), s);
        s
    }

    fn term(&mut self, t: &LinTerm) -> SlotTerm {
        let coeffs = t.coeffs().map(|(v, c)| (self.lookup(v, false), c)).collect();
        SlotTerm { constant: t.constant_part(), coeffs }
    }

    fn pred(&mut self, p: &NumPredicate) -> SlotPred {
        match p {
            NumPredicate::Geq(t) => SlotPred::Geq(self.term(t)),
            NumPredicate::Cong(t, m) => SlotPred::Cong(self.term(t), (*m).max(1) as i64),
            NumPredicate::Not(a) => SlotPred::Not(Box::new(self.pred(a))),
            NumPredicate::And(a, b) => SlotPred::And(Box::new(self.pred(a)), Box::new(self.pred(b))),
            NumPredicate::Or(a, b) => SlotPred::Or(Box::new(self.pred(a)), Box::new(self.pred(b))),
        }
    }

    fn push(&mut self, node: Node, mut deps: Vec<Slot>) -> NodeId {
        deps.sort_unstable();
        deps.dedup();
        self.nodes.push(node);
        self.deps.push(deps);
        self.nodes.len() - 1
    }

    fn pred_slots(p: &SlotPred, out: &mut Vec<Slot>) {
        match p {
            SlotPred::Geq(t) | SlotPred::Cong(t, _) => out.extend(t.coeffs.iter().map(|(s, _)| *s)),
            SlotPred::Not(a) => Self::pred_slots(a, out),
            SlotPred::And(a, b) | SlotPred::Or(a, b) => {
                Self::pred_slots(a, out);
                Self::pred_slots(b, out);
            }
        }
    }

    fn build(&mut self, e: &CoreExpr) -> NodeId {
        match e {
            CoreExpr::Atom(w) => self.push(Node::Atom(w.as_bytes().to_vec()), vec![]),
            CoreExpr::Not(a) => {
                let a = self.build(a);
                let d = self.deps[a].clone();
                self.push(Node::Not(a), d)
            }
            CoreExpr::Reverse(a) => {
                let a = self.build(a);
                let d = self.deps[a].clone();
                self.push(Node::Reverse(a), d)
            }
            CoreExpr::Or(a, b) | CoreExpr::Concat(a, b) => {
                let a = self.build(a);
                let b = self.build(b);
                let mut d = self.deps[a].clone();
                d.extend(&self.deps[b]);
                let node = if matches!(e, CoreExpr::Or(..)) { Node::Or(a, b) } else { Node::Concat(a, b) };
                self.push(node, d)
            }
            CoreExpr::Rep(p, a) | CoreExpr::Has(p, a) => {
                let sp = self.pred(p);
                let a = self.build(a);
                let mut d = self.deps[a].clone();
                Self::pred_slots(&sp, &mut d);
                let node =
                    if matches!(e, CoreExpr::Rep(..)) { Node::Rep(sp, p.period() as i64, a) } else { Node::Has(sp, a) };
                self.push(node, d)
            }
            CoreExpr::ExistsNum(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), false, slot));
                let b = self.build(body);
                self.scope.pop();
                let mut atoms = Vec::new();
                for p in body.predicates() {
                    let geq = geq_terms(p);
                    for t in p.terms() {
                        let st = self.resolve_in_scope(t, v, slot);
                        let own = st.coeffs.iter().filter(|(s, _)| *s == slot).map(|(_, c)| c).sum();
                        let outer = st.coeffs.iter().filter(|(s, _)| *s != slot && *s != usize::MAX).copied().collect();
                        let is_geq = geq.iter().any(|g| std::ptr::eq(*g, t));
                        atoms.push(BoundAtom { own, constant: st.constant, outer, geq: is_geq });
                    }
                }
                let period = body.predicates().iter().flat_map(|p| p.moduli()).fold(1, lcm) as i64;
                let d: Vec<Slot> = self.deps[b].iter().copied().filter(|s| *s != slot).collect();
                self.push(Node::ExistsNum { slot, body: b, atoms, period }, d)
            }
            CoreExpr::ExistsStr(v, body) => {
                let slot = self.slots;
                self.slots += 1;
                self.scope.push((v.clone(), true, slot));
                let b = self.build(body);
                self.scope.pop();
                let d: Vec<Slot> = self.deps[b].iter().copied().filter(|s| *s != slot).collect();
                self.push(Node::ExistsStr(slot, b), d)
            }
            CoreExpr::StrVar(v) => {
                let s = self.lookup(v, true);
                self.push(Node::StrVar(s), vec![s])
            }
        }
    }

    /// Resolves a term appearing under binder `v`; names bound deeper than
    /// `v` get fresh placeholder slots that are ignored by the bound.
    fn resolve_in_scope(&mut self, t: &LinTerm, v: &str, slot: Slot) -> SlotTerm {
        let mut coeffs = Vec::new();
        for (name, c) in t.coeffs() {
            let s = if name == v {
                slot
            } else if let Some((_, _, s)) = self.scope.iter().rev().find(|(n, k, _)| n == name && !k) {
                *s
            } else if let Some(s) = self.free_nums.get(name) {
                *s
            } else {
                usize::MAX
            };
            coeffs.push((s, c));
        }
        SlotTerm { constant: t.constant_part(), coeffs }
    }
}

impl Evaluator {
    pub fn new(e: &CoreExpr, sigma: &Alphabet) -> Self {
        let mut b = Builder {
            nodes: Vec::new(),
            deps: Vec::new(),
            scope: Vec::new(),
            slots: 0,
            free_nums: BTreeMap::new(),
            free_strs: BTreeMap::new(),
        };
        let root = b.build(e);
        Evaluator {
            nodes: b.nodes,
            deps: b.deps,
            root,
            slots: b.slots,
            free_nums: b.free_nums.into_iter().collect(),
            free_strs: b.free_strs.into_iter().collect(),
            sigma: sigma.clone(),
        }
    }

    /// Evaluates a closed expression with the default budget.
    pub fn accepts(&self, w: &str) -> Result<bool, EvalError> {
        self.eval(w, &Interpretation::default(), &EvalBudget::default()).map(|o| o.value)
    }

    pub fn eval(&self, w: &str, beta: &Interpretation, budget: &EvalBudget) -> Result<Outcome, EvalError> {
        let mut run = self.start(w, beta, budget)?;
        let n = run.word.len();
        let value = run.sat(self.root, 0, n, false)?;
        Ok(Outcome { value, steps: run.steps })
    }

    fn start<'a>(&'a self, w: &str, beta: &Interpretation, budget: &EvalBudget) -> Result<Run<'a>, EvalError> {
        if let Some(c) = w.chars().find(|c| !self.sigma.contains(*c)) {
            return Err(EvalError::SymbolNotInAlphabet(c));
        }
        let mut run = Run {
            ev: self,
            word: w.as_bytes().to_vec(),
            env: vec![0; self.slots],
            memo: HashMap::new(),
            counts_memo: HashMap::new(),
            interned: Vec::new(),
            intern_ids: HashMap::new(),
            steps: 0,
            budget: *budget,
        };
        for (name, slot) in &self.free_nums {
            let v = beta.nums.get(name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
            run.env[*slot] = *v as i64;
        }
        for (name, slot) in &self.free_strs {
            let v = beta.strs.get(name).ok_or_else(|| EvalError::UnboundVariable(name.clone()))?;
            run.env[*slot] = run.intern(v.as_bytes().to_vec());
        }
        Ok(run)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct MemoKey {
    node: u32,
    i: u32,
    j: u32,
    rev: bool,
    env: Box<[i64]>,
}

struct Run<'a> {
    ev: &'a Evaluator,
    word: Vec<u8>,
    env: Vec<i64>,
    memo: HashMap<MemoKey, bool>,
    counts_memo: HashMap<MemoKey, CountSet>,
    interned: Vec<Vec<u8>>,
    intern_ids: HashMap<Vec<u8>, i64>,
    steps: u64,
    budget: EvalBudget,
}

impl Run<'_> {
    fn intern(&mut self, s: Vec<u8>) -> i64 {
        if let Some(id) = self.intern_ids.get(&s) {
            return *id;
        }
        let id = self.interned.len() as i64;
        self.interned.push(s.clone());
        self.intern_ids.insert(s, id);
        id
    }

    fn sym(&self, k: usize, rev: bool) -> u8 {
        if rev {
            self.word[self.word.len() - 1 - k]
        } else {
            self.word[k]
        }
    }

    fn key(&self, node: NodeId, i: usize, j: usize, rev: bool) -> MemoKey {
        let deps = &self.ev.deps[node];
        let env: Box<[i64]> = deps.iter().map(|s| self.env[*s]).collect();
        MemoKey { node: node as u32, i: i as u32, j: j as u32, rev, env }
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.budget.max_steps {
            return Err(EvalError::BudgetExceeded(format!("more than {} evaluation steps", self.budget.max_steps)));
        }
        Ok(())
    }

    /// Does the segment `[i, j)` of the current view satisfy `node`?
    fn sat(&mut self, node: NodeId, i: usize, j: usize, rev: bool) -> Result<bool, EvalError> {
        let key = self.key(node, i, j, rev);
        if let Some(v) = self.memo.get(&key) {
            return Ok(*v);
        }
        self.tick()?;
        let ev = self.ev;
        let value = match &ev.nodes[node] {
            Node::Atom(a) => a.len() == j - i && (0..a.len()).all(|k| self.sym(i + k, rev) == a[k]),
            Node::Not(a) => !self.sat(*a, i, j, rev)?,
            Node::Or(a, b) => self.sat(*a, i, j, rev)? || self.sat(*b, i, j, rev)?,
            Node::Concat(a, b) => {
                let mut found = false;
                for k in i..=j {
                    if self.sat(*a, i, k, rev)? && self.sat(*b, k, j, rev)? {
                        found = true;
                        break;
                    }
                }
                found
            }
            Node::Rep(p, period, a) => {
                let set = self.counts(*a, i, j, rev)?;
                p.satisfied_by(&set, *period, &self.env)
            }
            Node::Has(p, a) => {
                let mut count = 0i64;
                for s in i..=j {
                    if self.matches_prefix(*a, s, j, rev)? {
                        count += 1;
                    }
                }
                p.holds(count, &self.env)
            }
            Node::ExistsNum { slot, body, atoms, period } => {
                let bound = self.search_bound(atoms, *period, j - i);
                if bound > self.budget.max_witness {
                    return Err(EvalError::BudgetExceeded(format!(
                        "witness search up to {bound} exceeds {}",
                        self.budget.max_witness
                    )));
                }
                let saved = self.env[*slot];
                let mut found = false;
                for x in 0..=bound as i64 {
                    self.env[*slot] = x;
                    if self.sat(*body, i, j, rev)? {
                        found = true;
                        break;
                    }
                }
                self.env[*slot] = saved;
                found
            }
            Node::ExistsStr(slot, body) => {
                let saved = self.env[*slot];
                let mut found = false;
                for cand in self.string_candidates(i, j, rev) {
                    self.env[*slot] = self.intern(cand);
                    if self.sat(*body, i, j, rev)? {
                        found = true;
                        break;
                    }
                }
                self.env[*slot] = saved;
                found
            }
            Node::StrVar(s) => {
                let id = self.env[*s] as usize;
                let len = self.interned[id].len();
                len == j - i && (0..len).all(|k| self.sym(i + k, rev) == self.interned[id][k])
            }
            Node::Reverse(a) => {
                let n = self.word.len();
                self.sat(*a, n - j, n - i, !rev)?
            }
        };
        self.memo.insert(key, value);
        Ok(value)
    }

    /// Some prefix of `[s, j)` satisfies `node`.
    fn matches_prefix(&mut self, node: NodeId, s: usize, j: usize, rev: bool) -> Result<bool, EvalError> {
        for q in s..=j {
            if self.sat(node, s, q, rev)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn counts(&mut self, node: NodeId, i: usize, j: usize, rev: bool) -> Result<CountSet, EvalError> {
        let key = self.key(node, i, j, rev);
        if let Some(c) = self.counts_memo.get(&key) {
            return Ok(c.clone());
        }
        let len = j - i;
        // reach[k]: piece counts that exactly cover [i, i+k) with nonempty pieces
        let mut reach: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); len + 1];
        reach[0].insert(0);
        for k in 1..=len {
            let mut here = BTreeSet::new();
            for p in 0..k {
                if reach[p].is_empty() {
                    continue;
                }
                if self.sat(node, i + p, i + k, rev)? {
                    here.extend(reach[p].iter().map(|c| c + 1));
                }
            }
            reach[k] = here;
        }
        let exact = std::mem::take(&mut reach[len]);
        let set = if self.sat(node, i, i, rev)? {
            CountSet { finite: BTreeSet::new(), tail_from: exact.iter().next().copied() }
        } else {
            CountSet { finite: exact, tail_from: None }
        };
        self.counts_memo.insert(key, set.clone());
        Ok(set)
    }

    /// Witness range for a number quantifier over a segment of length `len`:
    /// beyond it every threshold comparison involving the bound variable has
    /// settled and only the residue modulo `period` still varies.
    fn search_bound(&self, atoms: &[BoundAtom], period: i64, len: usize) -> u64 {
        let k = len as i64 + 2 + period;
        let offset = |a: &BoundAtom| a.constant + a.outer.iter().map(|(s, c)| c * self.env[*s]).sum::<i64>();
        let mut x0 = 0i64;
        for a in atoms.iter().filter(|a| a.own != 0) {
            x0 = x0.max((offset(a).abs() + k + a.own.abs() - 1) / a.own.abs());
        }
        for (idx, a) in atoms.iter().enumerate() {
            for b in &atoms[idx + 1..] {
                if a.geq && b.geq && a.own != b.own {
                    let diff = (a.own - b.own).abs();
                    x0 = x0.max(((offset(a) - offset(b)).abs() + k + diff - 1) / diff);
                }
            }
        }
        (x0 + period) as u64
    }

    /// Candidate values for a string variable bound over `[i, j)`: every
    /// factor and reversed factor of the segment, plus one word too long to
    /// match anywhere, in length-then-lexicographic order.
    fn string_candidates(&self, i: usize, j: usize, rev: bool) -> Vec<Vec<u8>> {
        let mut set: BTreeSet<(usize, Vec<u8>)> = BTreeSet::new();
        for p in i..=j {
            for q in p..=j {
                let f: Vec<u8> = (p..q).map(|k| self.sym(k, rev)).collect();
                let r: Vec<u8> = f.iter().rev().copied().collect();
                set.insert((f.len(), f));
                set.insert((r.len(), r));
            }
        }
        let mut long: Vec<u8> = (i..j).map(|k| self.sym(k, rev)).collect();
        long.push(self.ev.sigma.symbols()[0]);
        set.insert((long.len(), long));
        set.into_iter().map(|(_, w)| w).collect()
    }
}
