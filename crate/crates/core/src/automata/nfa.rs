use std::collections::BTreeSet;
use std::fmt::Write;

use crate::syntax::Alphabet;

/// Nondeterministic automaton with epsilon moves. Symbols are stored as
/// indices into the alphabet; `None` labels an epsilon edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Alphabet,
    edges: Vec<Vec<(Option<usize>, usize)>>,
    initial: BTreeSet<usize>,
    accepting: Vec<bool>,
}

impl Nfa {
    pub fn new(alphabet: Alphabet) -> Self {
        Nfa { alphabet, edges: Vec::new(), initial: BTreeSet::new(), accepting: Vec::new() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.edges.push(Vec::new());
        self.accepting.push(accepting);
        self.edges.len() - 1
    }

    pub fn add_edge(&mut self, from: usize, symbol: Option<usize>, to: usize) {
        assert!(to < self.edges.len() && symbol.is_none_or(|s| s < self.alphabet.len()));
        self.edges[from].push((symbol, to));
    }

    pub fn add_initial(&mut self, state: usize) {
        self.initial.insert(state);
    }

    pub fn set_accepting(&mut self, state: usize, accepting: bool) {
        self.accepting[state] = accepting;
    }

    pub fn state_count(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn edges(&self, state: usize) -> &[(Option<usize>, usize)] {
        &self.edges[state]
    }

    /// Accepts exactly `{w}`.
    pub fn word(alphabet: &Alphabet, w: &[usize]) -> Nfa {
        let mut n = Nfa::new(alphabet.clone());
        let mut cur = n.add_state(w.is_empty());
        n.add_initial(cur);
        for (k, &s) in w.iter().enumerate() {
            let next = n.add_state(k + 1 == w.len());
            n.add_edge(cur, Some(s), next);
            cur = next;
        }
        n
    }

    /// Copies the states of `other` into `self`, returning the index offset.
    fn absorb(&mut self, other: &Nfa) -> usize {
        let off = self.edges.len();
        for (q, es) in other.edges.iter().enumerate() {
            self.add_state(other.accepting[q]);
            for &(s, t) in es {
                self.edges[off + q].push((s, off + t));
            }
        }
        off
    }

    pub fn union(&self, other: &Nfa) -> Nfa {
        let mut n = self.clone();
        let off = n.absorb(other);
        for &q in &other.initial {
            n.add_initial(off + q);
        }
        n
    }

    pub fn concat(&self, other: &Nfa) -> Nfa {
        let mut n = self.clone();
        let off = n.absorb(other);
        for q in 0..self.state_count() {
            if self.accepting[q] {
                n.accepting[q] = false;
                for &i in &other.initial {
                    n.add_edge(q, None, off + i);
                }
            }
        }
        n
    }

    pub fn star(&self) -> Nfa {
        let mut n = self.clone();
        let start = n.add_state(true);
        for &i in &self.initial {
            n.add_edge(start, None, i);
        }
        for q in 0..self.state_count() {
            if self.accepting[q] {
                n.add_edge(q, None, start);
            }
        }
        n.initial = BTreeSet::from([start]);
        n
    }

    pub fn eps_closure(&self, states: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = states.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &(s, t) in &self.edges[q] {
                if s.is_none() && states.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    pub fn step(&self, states: &BTreeSet<usize>, symbol: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &q in states {
            for &(s, t) in &self.edges[q] {
                if s == Some(symbol) {
                    out.insert(t);
                }
            }
        }
        self.eps_closure(&mut out);
        out
    }

    /// Direct simulation; words with symbols outside the alphabet are rejected.
    pub fn accepts(&self, w: &str) -> bool {
        let mut cur = self.initial.clone();
        self.eps_closure(&mut cur);
        for b in w.bytes() {
            let Some(s) = self.alphabet.index_of(b) else { return false };
            cur = self.step(&cur, s);
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// Graphviz rendering: one node per state, edges labelled by symbol.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph nfa {\n  rankdir=LR;\n");
        for q in 0..self.state_count() {
            let shape = if self.accepting[q] { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  q{q} [shape={shape}];");
        }
        for &q in &self.initial {
            let _ = writeln!(out, "  start{q} [shape=point];\n  start{q} -> q{q};");
        }
        for (q, es) in self.edges.iter().enumerate() {
            for &(s, t) in es {
                let label = s.map_or("eps".to_string(), |s| (self.alphabet.symbols()[s] as char).to_string());
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Automaton for the reversed language: edges flipped, initial and
/// accepting states swapped.
pub fn reverse(n: &Nfa) -> Nfa {
    let mut r = Nfa::new(n.alphabet.clone());
    for q in 0..n.state_count() {
        r.add_state(n.initial.contains(&q));
    }
    for (q, es) in n.edges.iter().enumerate() {
        for &(s, t) in es {
            r.edges[t].push((s, q));
        }
    }
    for q in 0..n.state_count() {
        if n.accepting[q] {
            r.add_initial(q);
        }
    }
    r
}
