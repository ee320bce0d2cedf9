use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write;

use super::nfa::Nfa;
use super::AutomataError;
use crate::syntax::Alphabet;

/// Complete deterministic automaton. `delta[q * k + s]` is the successor of
/// state `q` on the symbol with alphabet index `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Alphabet,
    delta: Vec<usize>,
    initial: usize,
    accepting: Vec<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    And,
    Or,
    Xor,
}

impl ProductMode {
    fn combine(self, a: bool, b: bool) -> bool {
        match self {
            ProductMode::And => a && b,
            ProductMode::Or => a || b,
            ProductMode::Xor => a != b,
        }
    }
}

impl Dfa {
    /// Builds a DFA from a transition table indexed `[state][symbol]`.
    pub fn from_table(alphabet: Alphabet, table: Vec<Vec<usize>>, initial: usize, accepting: Vec<bool>) -> Dfa {
        let k = alphabet.len();
        assert_eq!(table.len(), accepting.len());
        assert!(initial < table.len());
        let mut delta = Vec::with_capacity(table.len() * k);
        for row in &table {
            assert_eq!(row.len(), k, "transition function must be total");
            assert!(row.iter().all(|&t| t < table.len()));
            delta.extend_from_slice(row);
        }
        Dfa { alphabet, delta, initial, accepting }
    }

    /// Accepts every word (`all = true`) or none.
    pub fn trivial(alphabet: &Alphabet, all: bool) -> Dfa {
        Dfa::from_table(alphabet.clone(), vec![vec![0; alphabet.len()]], 0, vec![all])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn next(&self, q: usize, symbol: usize) -> usize {
        self.delta[q * self.alphabet.len() + symbol]
    }

    /// State reached from the initial state, or `None` for foreign symbols.
    pub fn run(&self, w: &str) -> Option<usize> {
        let mut q = self.initial;
        for b in w.bytes() {
            q = self.next(q, self.alphabet.index_of(b)?);
        }
        Some(q)
    }

    pub fn accepts(&self, w: &str) -> bool {
        self.run(w).is_some_and(|q| self.accepting[q])
    }

    pub fn accepts_empty(&self) -> bool {
        self.accepting[self.initial]
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for a in &mut d.accepting {
            *a = !*a;
        }
        d
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_accepted().is_none()
    }

    /// Length-minimal accepted word, least in alphabet order among those.
    ///
    /// Breadth-first search that expands states in discovery order and
    /// symbols in alphabet order discovers every state through its
    /// shortlex-least word, so the first accepting state found wins.
    pub fn shortest_accepted(&self) -> Option<String> {
        let k = self.alphabet.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.state_count()];
        let mut seen = vec![false; self.state_count()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            if self.accepting[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = parent[cur] {
                    word.push(self.alphabet.symbols()[s]);
                    cur = p;
                }
                word.reverse();
                return Some(String::from_utf8(word).expect("alphabet is ASCII"));
            }
            for s in 0..k {
                let t = self.next(q, s);
                if !seen[t] {
                    seen[t] = true;
                    parent[t] = Some((q, s));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// Same language as an automaton without epsilon edges.
    pub fn to_nfa(&self) -> Nfa {
        let mut n = Nfa::new(self.alphabet.clone());
        for q in 0..self.state_count() {
            n.add_state(self.accepting[q]);
        }
        n.add_initial(self.initial);
        for q in 0..self.state_count() {
            for s in 0..self.alphabet.len() {
                n.add_edge(q, Some(s), self.next(q, s));
            }
        }
        n
    }

    /// States from which some accepting state is reachable.
    pub fn live_states(&self) -> Vec<bool> {
        let k = self.alphabet.len();
        let mut inv: Vec<Vec<usize>> = vec![Vec::new(); self.state_count()];
        for q in 0..self.state_count() {
            for s in 0..k {
                inv[self.next(q, s)].push(q);
            }
        }
        let mut live = self.accepting.clone();
        let mut stack: Vec<usize> = (0..self.state_count()).filter(|&q| live[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &inv[q] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        live
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  start [shape=point];\n");
        for q in 0..self.state_count() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        let _ = writeln!(out, "  start -> q{};", self.initial);
        for q in 0..self.state_count() {
            for (s, sym) in self.alphabet.chars().enumerate() {
                let _ = writeln!(out, "  q{q} -> q{} [label=\"{sym}\"];", self.next(q, s));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Subset construction with epsilon closure; the empty subset becomes the sink.
pub fn determinize(n: &Nfa, limit: usize) -> Result<Dfa, AutomataError> {
    let k = n.alphabet().len();
    let mut start = n.initial().clone();
    n.eps_closure(&mut start);
    let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut table: Vec<Vec<usize>> = Vec::new();
    ids.insert(start.clone(), 0);
    sets.push(start);
    let mut next = 0;
    while next < sets.len() {
        let cur = sets[next].clone();
        let mut row = Vec::with_capacity(k);
        for s in 0..k {
            let t = n.step(&cur, s);
            let id = match ids.get(&t) {
                Some(&id) => id,
                None => {
                    if sets.len() >= limit {
                        return Err(AutomataError::BudgetExceeded { limit });
                    }
                    ids.insert(t.clone(), sets.len());
                    sets.push(t);
                    sets.len() - 1
                }
            };
            row.push(id);
        }
        table.push(row);
        next += 1;
    }
    let accepting = sets.iter().map(|s| s.iter().any(|&q| n.is_accepting(q))).collect();
    Ok(Dfa::from_table(n.alphabet().clone(), table, 0, accepting))
}

/// Product over reachable state pairs.
pub fn product(a: &Dfa, b: &Dfa, mode: ProductMode, limit: usize) -> Result<Dfa, AutomataError> {
    if a.alphabet != b.alphabet {
        return Err(AutomataError::AlphabetMismatch);
    }
    let k = a.alphabet.len();
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = vec![(a.initial, b.initial)];
    ids.insert(pairs[0], 0);
    let mut table = Vec::new();
    let mut next = 0;
    while next < pairs.len() {
        let (p, q) = pairs[next];
        let mut row = Vec::with_capacity(k);
        for s in 0..k {
            let t = (a.next(p, s), b.next(q, s));
            let id = match ids.get(&t) {
                Some(&id) => id,
                None => {
                    if pairs.len() >= limit {
                        return Err(AutomataError::BudgetExceeded { limit });
                    }
                    ids.insert(t, pairs.len());
                    pairs.push(t);
                    pairs.len() - 1
                }
            };
            row.push(id);
        }
        table.push(row);
        next += 1;
    }
    let accepting = pairs.iter().map(|&(p, q)| mode.combine(a.accepting[p], b.accepting[q])).collect();
    Ok(Dfa::from_table(a.alphabet.clone(), table, 0, accepting))
}

/// Minimal complete DFA via Hopcroft partition refinement, with states
/// renumbered in breadth-first order so equal languages give equal automata.
pub fn minimize(d: &Dfa) -> Dfa {
    let k = d.alphabet.len();
    let reach = canonical_order(d);
    let n = reach.len();
    let index: HashMap<usize, usize> = reach.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let succ = |q: usize, s: usize| index[&d.next(reach[q], s)];

    let mut inv: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
    for q in 0..n {
        for (s, pre) in inv.iter_mut().enumerate() {
            pre[succ(q, s)].push(q);
        }
    }

    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let (acc, rej): (Vec<usize>, Vec<usize>) = (0..n).partition(|&q| d.accepting[reach[q]]);
    for b in [acc, rej] {
        if !b.is_empty() {
            for &q in &b {
                block_of[q] = blocks.len();
            }
            blocks.push(b);
        }
    }
    let mut in_work: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
    let mut work: Vec<(usize, usize)> = Vec::new();
    if blocks.len() == 2 {
        let smaller = if blocks[0].len() <= blocks[1].len() { 0 } else { 1 };
        for s in 0..k {
            work.push((smaller, s));
            in_work[smaller][s] = true;
        }
    }
    let mut marked = vec![false; n];
    while let Some((a, s)) = work.pop() {
        in_work[a][s] = false;
        let mut touched: HashMap<usize, Vec<usize>> = HashMap::new();
        for &t in &blocks[a] {
            for &q in &inv[s][t] {
                touched.entry(block_of[q]).or_default().push(q);
            }
        }
        let mut touched: Vec<(usize, Vec<usize>)> = touched.into_iter().collect();
        touched.sort_unstable_by_key(|(b, _)| *b);
        for (y, xs) in touched {
            if xs.len() == blocks[y].len() {
                continue;
            }
            for &q in &xs {
                marked[q] = true;
            }
            blocks[y].retain(|&q| !marked[q]);
            let z = blocks.len();
            for &q in &xs {
                marked[q] = false;
                block_of[q] = z;
            }
            blocks.push(xs);
            in_work.push(vec![false; k]);
            for c in 0..k {
                let pick = if in_work[y][c] || blocks[z].len() <= blocks[y].len() { z } else { y };
                if !in_work[pick][c] {
                    in_work[pick][c] = true;
                    work.push((pick, c));
                }
            }
        }
    }

    let table: Vec<Vec<usize>> = blocks.iter().map(|b| (0..k).map(|s| block_of[succ(b[0], s)]).collect()).collect();
    let accepting: Vec<bool> = blocks.iter().map(|b| d.accepting[reach[b[0]]]).collect();
    let quotient = Dfa::from_table(d.alphabet.clone(), table, block_of[0], accepting);
    renumber(&quotient)
}

/// Reachable states in breadth-first discovery order.
fn canonical_order(d: &Dfa) -> Vec<usize> {
    let mut seen = vec![false; d.state_count()];
    let mut order = vec![d.initial];
    seen[d.initial] = true;
    let mut i = 0;
    while i < order.len() {
        for s in 0..d.alphabet.len() {
            let t = d.next(order[i], s);
            if !seen[t] {
                seen[t] = true;
                order.push(t);
            }
        }
        i += 1;
    }
    order
}

fn renumber(d: &Dfa) -> Dfa {
    let order = canonical_order(d);
    let mut index = vec![usize::MAX; d.state_count()];
    for (i, &q) in order.iter().enumerate() {
        index[q] = i;
    }
    let table = order.iter().map(|&q| (0..d.alphabet.len()).map(|s| index[d.next(q, s)]).collect()).collect();
    let accepting = order.iter().map(|&q| d.accepting[q]).collect();
    Dfa::from_table(d.alphabet.clone(), table, 0, accepting)
}

/// Shortlex-least word accepted by exactly one of the automata.
pub fn shortest_in_sym_diff(a: &Dfa, b: &Dfa) -> Option<String> {
    product(a, b, ProductMode::Xor, usize::MAX).expect("automata share an alphabet").shortest_accepted()
}
