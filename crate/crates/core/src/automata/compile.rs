use std::collections::HashMap;

use super::counter::CounterSpec;
use super::dfa::{determinize, minimize, product, Dfa, ProductMode};
use super::nfa::{reverse, Nfa};
use super::AutomataError;
use crate::syntax::{Alphabet, CoreExpr, NumPredicate};

/// Compiles a quantifier-free closed expression to an automaton accepting
/// exactly the words that satisfy it.
pub fn compile_regular(e: &CoreExpr, sigma: &Alphabet, limit: usize) -> Result<Nfa, AutomataError> {
    Ok(compile_dfa(e, sigma, limit)?.to_nfa())
}

/// Like [`compile_regular`] but returns the minimal DFA.
pub fn compile_dfa(e: &CoreExpr, sigma: &Alphabet, limit: usize) -> Result<Dfa, AutomataError> {
    Compiler { sigma, limit, cache: HashMap::new() }.dfa(e)
}

struct Compiler<'a> {
    sigma: &'a Alphabet,
    limit: usize,
    cache: HashMap<CoreExpr, Dfa>,
}

impl Compiler<'_> {
    fn dfa(&mut self, e: &CoreExpr) -> Result<Dfa, AutomataError> {
        if let Some(d) = self.cache.get(e) {
            return Ok(d.clone());
        }
        let d = minimize(&self.build(e)?);
        if d.state_count() > self.limit {
            return Err(AutomataError::BudgetExceeded { limit: self.limit });
        }
        self.cache.insert(e.clone(), d.clone());
        Ok(d)
    }

    fn build(&mut self, e: &CoreExpr) -> Result<Dfa, AutomataError> {
        match e {
            CoreExpr::Atom(w) => {
                let mut syms = Vec::with_capacity(w.len());
                for b in w.bytes() {
                    match self.sigma.index_of(b) {
                        Some(s) => syms.push(s),
                        None => return Ok(Dfa::trivial(self.sigma, false)),
                    }
                }
                determinize(&Nfa::word(self.sigma, &syms), self.limit)
            }
            CoreExpr::Not(a) => Ok(self.dfa(a)?.complement()),
            CoreExpr::Or(a, b) => {
                let (a, b) = (self.dfa(a)?, self.dfa(b)?);
                product(&a, &b, ProductMode::Or, self.limit)
            }
            CoreExpr::Concat(a, b) => {
                let (a, b) = (self.dfa(a)?, self.dfa(b)?);
                determinize(&a.to_nfa().concat(&b.to_nfa()), self.limit)
            }
            CoreExpr::Reverse(a) => determinize(&reverse(&self.dfa(a)?.to_nfa()), self.limit),
            CoreExpr::Rep(p, a) => {
                let d = self.dfa(a)?;
                self.repetition(&closed(p)?, &d)
            }
            CoreExpr::Has(p, a) => {
                let d = self.dfa(a)?;
                self.occurrences(&closed(p)?, &d)
            }
            CoreExpr::ExistsNum(v, _) => Err(AutomataError::NotRegular(format!("number quantifier over {v}"))),
            CoreExpr::ExistsStr(v, _) => Err(AutomataError::NotRegular(format!("string quantifier over {v}"))),
            CoreExpr::StrVar(v) => Err(AutomataError::NotRegular(format!("string variable {v}"))),
        }
    }

    /// `REP(P, phi)`: split the input into nonempty `phi`-pieces while a
    /// counter tracks how many were closed. When `phi` matches the empty
    /// word, any number of empty pieces can be added, so a count `k` of
    /// nonempty pieces is good iff some `n >= k` satisfies `P`.
    fn repetition(&mut self, p: &NumPredicate, phi: &Dfa) -> Result<Dfa, AutomataError> {
        let mut counter = CounterSpec::new(p);
        let mut piece = phi.clone();
        if phi.accepts_empty() {
            counter = counter.downward_closure();
            let eps = minimize(&determinize(&Nfa::word(self.sigma, &[]), self.limit)?);
            piece = product(phi, &eps.complement(), ProductMode::And, self.limit)?;
        }
        let live = piece.live_states();
        let k = self.sigma.len();
        let c = counter.states();
        let q = piece.state_count();
        if c * (q + 1) > self.limit {
            return Err(AutomataError::BudgetExceeded { limit: self.limit });
        }
        // boundary(i) = i, inside(i, s) = c + i * q + s
        let mut n = Nfa::new(self.sigma.clone());
        for i in 0..c {
            n.add_state(counter.accepts(i));
        }
        for _ in 0..c * q {
            n.add_state(false);
        }
        n.add_initial(counter.index(0));
        let inside = |i: usize, s: usize| c + i * q + s;
        for i in 0..c {
            for sym in 0..k {
                let t = piece.next(piece.initial(), sym);
                if live[t] {
                    n.add_edge(i, Some(sym), inside(i, t));
                }
            }
            for s in 0..q {
                if !live[s] {
                    continue;
                }
                for sym in 0..k {
                    let t = piece.next(s, sym);
                    if live[t] {
                        n.add_edge(inside(i, s), Some(sym), inside(i, t));
                    }
                }
                if piece.is_accepting(s) {
                    n.add_edge(inside(i, s), None, counter.step(i));
                }
            }
        }
        determinize(&n, self.limit)
    }

    /// `HAS(P, phi)`: a position starts an occurrence iff the suffix from it
    /// lies in `phi . TOP`. Reading the reversed input, a DFA for the reversed
    /// suffix language flags each such position as it passes, and a counter
    /// tallies them. Reversing that counting automaton gives the result.
    fn occurrences(&mut self, p: &NumPredicate, phi: &Dfa) -> Result<Dfa, AutomataError> {
        let counter = CounterSpec::new(p);
        let prefix_closed = absorb_accepting(phi);
        let back = minimize(&determinize(&reverse(&prefix_closed.to_nfa()), self.limit)?);
        let k = self.sigma.len();
        let c = counter.states();
        let r = back.state_count();
        if c * r > self.limit {
            return Err(AutomataError::BudgetExceeded { limit: self.limit });
        }
        let bump = |i: usize, s: usize| if back.is_accepting(s) { counter.step(i) } else { i };
        let id = |i: usize, s: usize| i * r + s;
        let mut n = Nfa::new(self.sigma.clone());
        for i in 0..c {
            for _ in 0..r {
                n.add_state(counter.accepts(i));
            }
        }
        n.add_initial(id(bump(counter.index(0), back.initial()), back.initial()));
        for i in 0..c {
            for s in 0..r {
                for sym in 0..k {
                    let t = back.next(s, sym);
                    n.add_edge(id(i, s), Some(sym), id(bump(i, t), t));
                }
            }
        }
        determinize(&reverse(&n), self.limit)
    }
}

/// `L(d) . Sigma*`: once an accepting state is reached, stay accepting.
fn absorb_accepting(d: &Dfa) -> Dfa {
    let k = d.alphabet().len();
    let sink = d.state_count();
    let mut table: Vec<Vec<usize>> = (0..sink)
        .map(|q| if d.is_accepting(q) { vec![sink; k] } else { (0..k).map(|s| d.next(q, s)).collect() })
        .collect();
    table.push(vec![sink; k]);
    let accepting = (0..=sink).map(|q| q == sink || d.is_accepting(q)).collect();
    Dfa::from_table(d.alphabet().clone(), table, d.initial(), accepting)
}

fn closed(p: &NumPredicate) -> Result<NumPredicate, AutomataError> {
    if p.vars().is_empty() {
        Ok(p.clone())
    } else {
        Err(AutomataError::NotRegular(format!("predicate with free variables {}", p.vars().join(", "))))
    }
}
