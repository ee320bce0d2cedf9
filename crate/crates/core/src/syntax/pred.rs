use std::fmt;

use super::LinTerm;

/// Unary number predicate as written by users, including the sugared atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pred {
    Eq(LinTerm),
    Ge(LinTerm),
    Gt(LinTerm),
    Le(LinTerm),
    Lt(LinTerm),
    /// `== t mod c`
    Mod(LinTerm, u64),
    Even,
    Odd,
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

/// Core number predicate: Boolean combinations of thresholds and congruences.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NumPredicate {
    /// `n >= t`
    Geq(LinTerm),
    /// `n == t (mod m)`
    Cong(LinTerm, u64),
    Not(Box<NumPredicate>),
    And(Box<NumPredicate>, Box<NumPredicate>),
    Or(Box<NumPredicate>, Box<NumPredicate>),
}

impl Pred {
    pub fn not(p: Pred) -> Pred {
        Pred::Not(Box::new(p))
    }

    pub fn and(a: Pred, b: Pred) -> Pred {
        Pred::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Pred, b: Pred) -> Pred {
        Pred::Or(Box::new(a), Box::new(b))
    }

    /// Resolves sugared atoms into thresholds and congruences.
    pub fn to_core(&self) -> NumPredicate {
        use NumPredicate as N;
        match self {
            Pred::Eq(t) => N::eq(t.clone()),
            Pred::Ge(t) => N::Geq(t.clone()),
            Pred::Gt(t) => N::Geq(t.offset(1)),
            Pred::Le(t) => N::not(N::Geq(t.offset(1))),
            Pred::Lt(t) => N::not(N::Geq(t.clone())),
            Pred::Mod(t, c) => N::Cong(t.clone(), *c),
            Pred::Even => N::Cong(LinTerm::constant(0), 2),
            Pred::Odd => N::Cong(LinTerm::constant(1), 2),
            Pred::Not(p) => N::not(p.to_core()),
            Pred::And(a, b) => N::and(a.to_core(), b.to_core()),
            Pred::Or(a, b) => N::or(a.to_core(), b.to_core()),
        }
    }

    pub fn terms(&self) -> Vec<&LinTerm> {
        let mut out = Vec::new();
        self.collect_terms(&mut out);
        out
    }

    fn collect_terms<'a>(&'a self, out: &mut Vec<&'a LinTerm>) {
        match self {
            Pred::Eq(t) | Pred::Ge(t) | Pred::Gt(t) | Pred::Le(t) | Pred::Lt(t) | Pred::Mod(t, _) => out.push(t),
            Pred::Even | Pred::Odd => {}
            Pred::Not(p) => p.collect_terms(out),
            Pred::And(a, b) | Pred::Or(a, b) => {
                a.collect_terms(out);
                b.collect_terms(out);
            }
        }
    }

    pub fn moduli(&self) -> Vec<u64> {
        match self {
            Pred::Mod(_, c) => vec![*c],
            Pred::Even | Pred::Odd => vec![2],
            Pred::Not(p) => p.moduli(),
            Pred::And(a, b) | Pred::Or(a, b) => {
                let mut m = a.moduli();
                m.extend(b.moduli());
                m
            }
            _ => vec![],
        }
    }
}

impl NumPredicate {
    pub fn not(p: NumPredicate) -> NumPredicate {
        NumPredicate::Not(Box::new(p))
    }

    pub fn and(a: NumPredicate, b: NumPredicate) -> NumPredicate {
        NumPredicate::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: NumPredicate, b: NumPredicate) -> NumPredicate {
        NumPredicate::Or(Box::new(a), Box::new(b))
    }

    /// `n = t`, encoded as `(>= t) & !(>= t+1)`.
    pub fn eq(t: LinTerm) -> NumPredicate {
        let next = t.offset(1);
        NumPredicate::and(NumPredicate::Geq(t), NumPredicate::not(NumPredicate::Geq(next)))
    }

    pub fn always() -> NumPredicate {
        NumPredicate::Geq(LinTerm::constant(0))
    }

    /// Recognizes the `= t` encoding produced by [`NumPredicate::eq`].
    pub fn as_exact(&self) -> Option<&LinTerm> {
        if let NumPredicate::And(a, b) = self {
            if let (NumPredicate::Geq(t), NumPredicate::Not(inner)) = (a.as_ref(), b.as_ref()) {
                if let NumPredicate::Geq(t1) = inner.as_ref() {
                    if *t1 == t.offset(1) {
                        return Some(t);
                    }
                }
            }
        }
        None
    }

    /// Truth of the predicate for `n`; `None` if a variable is unbound.
    pub fn holds<F>(&self, n: i64, lookup: &F) -> Option<bool>
    where
        F: Fn(&str) -> Option<i64>,
    {
        Some(match self {
            NumPredicate::Geq(t) => n >= t.eval(lookup)?,
            NumPredicate::Cong(t, m) => (n - t.eval(lookup)?).rem_euclid(*m as i64) == 0,
            NumPredicate::Not(p) => !p.holds(n, lookup)?,
            NumPredicate::And(a, b) => a.holds(n, lookup)? && b.holds(n, lookup)?,
            NumPredicate::Or(a, b) => a.holds(n, lookup)? || b.holds(n, lookup)?,
        })
    }

    pub fn holds_closed(&self, n: i64) -> Option<bool> {
        self.holds(n, &|_: &str| None)
    }

    pub fn terms(&self) -> Vec<&LinTerm> {
        let mut out = Vec::new();
        self.visit_terms(&mut |t| out.push(t));
        out
    }

    fn visit_terms<'a>(&'a self, f: &mut dyn FnMut(&'a LinTerm)) {
        match self {
            NumPredicate::Geq(t) | NumPredicate::Cong(t, _) => f(t),
            NumPredicate::Not(p) => p.visit_terms(f),
            NumPredicate::And(a, b) | NumPredicate::Or(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
        }
    }

    pub fn moduli(&self) -> Vec<u64> {
        match self {
            NumPredicate::Geq(_) => vec![],
            NumPredicate::Cong(_, m) => vec![*m],
            NumPredicate::Not(p) => p.moduli(),
            NumPredicate::And(a, b) | NumPredicate::Or(a, b) => {
                let mut m = a.moduli();
                m.extend(b.moduli());
                m
            }
        }
    }

    /// Least common multiple of all moduli (1 when there are none).
    pub fn period(&self) -> u64 {
        self.moduli().into_iter().fold(1, lcm)
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for t in self.terms() {
            for v in t.vars() {
                if !out.iter().any(|o| o == v) {
                    out.push(v.to_string());
                }
            }
        }
        out
    }

    pub fn map_terms(&self, f: &dyn Fn(&LinTerm) -> LinTerm) -> NumPredicate {
        match self {
            NumPredicate::Geq(t) => NumPredicate::Geq(f(t)),
            NumPredicate::Cong(t, m) => NumPredicate::Cong(f(t), *m),
            NumPredicate::Not(p) => NumPredicate::not(p.map_terms(f)),
            NumPredicate::And(a, b) => NumPredicate::and(a.map_terms(f), b.map_terms(f)),
            NumPredicate::Or(a, b) => NumPredicate::or(a.map_terms(f), b.map_terms(f)),
        }
    }

    pub fn rename(&self, from: &str, to: &str) -> NumPredicate {
        self.map_terms(&|t| t.rename(from, to))
    }

    pub fn substitute(&self, var: &str, value: &LinTerm) -> NumPredicate {
        self.map_terms(&|t| t.substitute(var, value))
    }

    /// Back-embedding into the surface syntax (`Geq` to `>=`, `Cong` to `== t mod m`).
    pub fn to_surface(&self) -> Pred {
        match self {
            NumPredicate::Geq(t) => Pred::Ge(t.clone()),
            NumPredicate::Cong(t, m) => Pred::Mod(t.clone(), *m),
            NumPredicate::Not(p) => Pred::not(p.to_surface()),
            NumPredicate::And(a, b) => Pred::and(a.to_surface(), b.to_surface()),
            NumPredicate::Or(a, b) => Pred::or(a.to_surface(), b.to_surface()),
        }
    }

    /// Human-oriented rendering that folds the common encodings back into
    /// `=`, `<`, `<=`, `>` and `EVEN`/`ODD`.
    pub fn friendly(&self) -> String {
        if let Some(t) = self.as_exact() {
            return format!("={t}");
        }
        match self {
            NumPredicate::Geq(t) => {
                if t.constant_part() >= 1 && !t.is_constant() {
                    format!(">{}", t.offset(-1))
                } else {
                    format!(">={t}")
                }
            }
            NumPredicate::Cong(t, 2) if t.is_constant() && t.constant_part().rem_euclid(2) == 0 => "EVEN".into(),
            NumPredicate::Cong(t, 2) if t.is_constant() => "ODD".into(),
            NumPredicate::Cong(t, m) => format!("== {t} mod {m}"),
            NumPredicate::Not(p) => match p.as_ref() {
                NumPredicate::Geq(t) => {
                    if t.constant_part() >= 1 {
                        format!("<={}", t.offset(-1))
                    } else {
                        format!("<{t}")
                    }
                }
                other => format!("!({})", other.friendly()),
            },
            NumPredicate::And(a, b) => format!("({}) & ({})", a.friendly(), b.friendly()),
            NumPredicate::Or(a, b) => format!("({}) | ({})", a.friendly(), b.friendly()),
        }
    }
}

impl fmt::Display for NumPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.friendly())
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sugar_resolution() {
        let t = LinTerm::constant(3);
        let eq = Pred::Eq(t.clone()).to_core();
        assert_eq!(eq.as_exact(), Some(&t));
        for n in 0..10 {
            assert_eq!(eq.holds_closed(n), Some(n == 3));
            assert_eq!(Pred::Gt(t.clone()).to_core().holds_closed(n), Some(n > 3));
            assert_eq!(Pred::Le(t.clone()).to_core().holds_closed(n), Some(n <= 3));
            assert_eq!(Pred::Lt(t.clone()).to_core().holds_closed(n), Some(n < 3));
            assert_eq!(Pred::Even.to_core().holds_closed(n), Some(n % 2 == 0));
            assert_eq!(Pred::Odd.to_core().holds_closed(n), Some(n % 2 == 1));
        }
    }

    #[test]
    fn non_positive_threshold_is_always_true() {
        let p = NumPredicate::Geq(LinTerm::constant(-4));
        assert!((0..5).all(|n| p.holds_closed(n) == Some(true)));
    }

    #[test]
    fn congruence_uses_mathematical_residue() {
        let p = NumPredicate::Cong(LinTerm::constant(-1), 3);
        assert_eq!(p.holds_closed(2), Some(true));
        assert_eq!(p.holds_closed(0), Some(false));
    }

    #[test]
    fn unbound_variable() {
        let p = NumPredicate::Geq(LinTerm::var("i"));
        assert_eq!(p.holds_closed(1), None);
        assert_eq!(p.holds(1, &|v: &str| (v == "i").then_some(1)), Some(true));
    }

    #[test]
    fn friendly_forms() {
        let x = LinTerm::var("x");
        assert_eq!(Pred::Gt(x.clone()).to_core().friendly(), ">x");
        assert_eq!(Pred::Le(x.clone()).to_core().friendly(), "<=x");
        assert_eq!(Pred::Eq(LinTerm::constant(3)).to_core().friendly(), "=3");
        assert_eq!(Pred::Even.to_core().friendly(), "EVEN");
        assert_eq!(lcm(4, 6), 12);
    }
}
