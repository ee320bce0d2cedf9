use crate::syntax::NumPredicate;

/// Finite-state counter for a closed number predicate.
///
/// Counts below `threshold` are tracked exactly; from `threshold` on only the
/// residue modulo `modulus` is kept. State `i < threshold` stands for the
/// count `i`, state `threshold + r` for every count `n >= threshold` with
/// `(n - threshold) % modulus == r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterSpec {
    pub threshold: u64,
    pub modulus: u64,
    pub accept: Vec<bool>,
}

impl CounterSpec {
    /// Panics if the predicate has free variables.
    pub fn new(p: &NumPredicate) -> CounterSpec {
        let threshold = p
            .terms()
            .into_iter()
            .map(|t| {
                assert!(t.is_constant(), "counter predicates must be closed");
                t.constant_part().max(0) as u64
            })
            .max()
            .unwrap_or(0);
        let modulus = p.period();
        let accept = (0..threshold + modulus).map(|n| p.holds_closed(n as i64).expect("closed predicate")).collect();
        CounterSpec { threshold, modulus, accept }
    }

    /// Counter that accepts `n` iff some `m >= n` is accepted by `self`.
    pub fn downward_closure(&self) -> CounterSpec {
        let tail = self.accept[self.threshold as usize..].iter().any(|&a| a);
        let mut accept = self.accept.clone();
        let mut later = tail;
        for i in (0..self.threshold as usize).rev() {
            later |= self.accept[i];
            accept[i] = later;
        }
        for a in &mut accept[self.threshold as usize..] {
            *a = tail;
        }
        CounterSpec { threshold: self.threshold, modulus: self.modulus, accept }
    }

    pub fn states(&self) -> usize {
        self.accept.len()
    }

    pub fn index(&self, n: u64) -> usize {
        if n < self.threshold {
            n as usize
        } else {
            (self.threshold + (n - self.threshold) % self.modulus) as usize
        }
    }

    /// State for `n + 1` given the state for `n`.
    pub fn step(&self, i: usize) -> usize {
        let t = self.threshold as usize;
        if i + 1 < t {
            i + 1
        } else if i < t {
            t
        } else {
            t + (i - t + 1) % self.modulus as usize
        }
    }

    pub fn accepts(&self, i: usize) -> bool {
        self.accept[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::LinTerm;

    #[test]
    fn table_matches_predicate() {
        let p = NumPredicate::or(
            NumPredicate::and(NumPredicate::Geq(LinTerm::constant(3)), NumPredicate::Cong(LinTerm::constant(1), 2)),
            NumPredicate::Cong(LinTerm::constant(0), 3),
        );
        let c = CounterSpec::new(&p);
        assert_eq!((c.threshold, c.modulus), (3, 6));
        let mut state = c.index(0);
        for n in 0..40u64 {
            assert_eq!(state, c.index(n));
            assert_eq!(c.accepts(state), p.holds_closed(n as i64).unwrap(), "n = {n}");
            state = c.step(state);
        }
    }

    #[test]
    fn downward_closure_of_exact_count() {
        let c = CounterSpec::new(&NumPredicate::eq(LinTerm::constant(2))).downward_closure();
        let got: Vec<bool> = (0..6).map(|n| c.accepts(c.index(n))).collect();
        assert_eq!(got, [true, true, true, false, false, false]);
    }
}
