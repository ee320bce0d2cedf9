use std::collections::BTreeMap;
use std::fmt;

/// A linear term `c1*x1 + ... + ck*xk + d` with signed integer coefficients.
///
/// The representation is canonical: variables are kept in name order and zero
/// coefficients are never stored, so structural equality is semantic equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinTerm {
    coeffs: BTreeMap<String, i64>,
    constant: i64,
}

impl LinTerm {
    pub fn constant(d: i64) -> Self {
        LinTerm { coeffs: BTreeMap::new(), constant: d }
    }

    pub fn var(name: impl Into<String>) -> Self {
        Self::scaled_var(name, 1)
    }

    pub fn scaled_var(name: impl Into<String>, coeff: i64) -> Self {
        let mut t = LinTerm::default();
        t.add_var(name.into(), coeff);
        t
    }

    fn add_var(&mut self, name: String, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.coeffs.entry(name).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.retain(|_, c| *c != 0);
        }
    }

    pub fn constant_part(&self) -> i64 {
        self.constant
    }

    pub fn coeff(&self, name: &str) -> i64 {
        self.coeffs.get(name).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (&str, i64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> + '_ {
        self.coeffs.keys().map(String::as_str)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn plus(&self, other: &LinTerm) -> LinTerm {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_var(v.clone(), *c);
        }
        out.constant += other.constant;
        out
    }

    pub fn minus(&self, other: &LinTerm) -> LinTerm {
        self.plus(&other.scale(-1))
    }

    pub fn offset(&self, d: i64) -> LinTerm {
        let mut out = self.clone();
        out.constant += d;
        out
    }

    pub fn scale(&self, k: i64) -> LinTerm {
        if k == 0 {
            return LinTerm::default();
        }
        LinTerm { coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(), constant: self.constant * k }
    }

    /// Returns the term with `name` replaced by `value`.
    pub fn substitute(&self, name: &str, value: &LinTerm) -> LinTerm {
        let c = self.coeff(name);
        if c == 0 {
            return self.clone();
        }
        let mut rest = self.clone();
        rest.coeffs.remove(name);
        rest.plus(&value.scale(c))
    }

    pub fn rename(&self, from: &str, to: &str) -> LinTerm {
        self.substitute(from, &LinTerm::var(to))
    }

    /// Evaluates the term; `None` when some variable has no value.
    pub fn eval<F>(&self, lookup: F) -> Option<i64>
    where
        F: Fn(&str) -> Option<i64>,
    {
        let mut acc = self.constant;
        for (v, c) in &self.coeffs {
            acc += c * lookup(v)?;
        }
        Some(acc)
    }

    /// Sum of `|d|` and all `|c_i|`.
    pub fn magnitude(&self) -> u64 {
        self.constant.unsigned_abs() + self.coeffs.values().map(|c| c.unsigned_abs()).sum::<u64>()
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            let c = *c;
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            if c.abs() != 1 {
                write!(f, "{}*", c.abs())?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        if first {
            write!(f, "{}", self.constant)
        } else if self.constant > 0 {
            write!(f, "+{}", self.constant)
        } else if self.constant < 0 {
            write!(f, "-{}", -self.constant)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_cancellation() {
        let i = LinTerm::var("i");
        let t = i.plus(&LinTerm::constant(1)).minus(&i).offset(1);
        assert!(t.is_constant());
        assert_eq!(t, LinTerm::constant(2));
    }

    #[test]
    fn display() {
        let t = LinTerm::var("i").plus(&LinTerm::scaled_var("j", -2)).offset(-1);
        assert_eq!(t.to_string(), "i-2*j-1");
        assert_eq!(LinTerm::constant(-3).to_string(), "-3");
        assert_eq!(LinTerm::scaled_var("x", -1).to_string(), "-x");
    }

    #[test]
    fn substitute_and_eval() {
        let t = LinTerm::scaled_var("x", 3).offset(2);
        let s = t.substitute("x", &LinTerm::var("y").offset(1));
        assert_eq!(s.to_string(), "3*y+5");
        assert_eq!(s.eval(|v| (v == "y").then_some(2)), Some(11));
        assert_eq!(s.eval(|_| None), None);
    }
}
