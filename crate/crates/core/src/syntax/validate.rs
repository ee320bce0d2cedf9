use std::fmt;

use super::{Alphabet, Expr, LinTerm};

/// Position of a node as child indices from the root (see [`Expr::children`]).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprPath(pub Vec<usize>);

impl ExprPath {
    pub fn root() -> Self {
        ExprPath(Vec::new())
    }

    pub fn child(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v.push(i);
        ExprPath(v)
    }

    /// Follows the path in `e`.
    pub fn resolve<'a>(&self, e: &'a Expr) -> Option<&'a Expr> {
        let mut cur = e;
        for &i in &self.0 {
            cur = *cur.children().get(i)?;
        }
        Some(cur)
    }
}

impl fmt::Display for ExprPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: ExprPath,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Num,
    Str,
}

struct Checker<'a> {
    sigma: &'a Alphabet,
    scope: Vec<(String, Kind)>,
    out: Vec<Diagnostic>,
}

/// Static checks: alphabet membership, variable binding, moduli and index ranges.
pub fn validate(e: &Expr, sigma: &Alphabet) -> Result<(), Vec<Diagnostic>> {
    let mut c = Checker { sigma, scope: Vec::new(), out: Vec::new() };
    c.visit(e, &ExprPath::root());
    if c.out.is_empty() {
        Ok(())
    } else {
        Err(c.out)
    }
}

impl Checker<'_> {
    fn report(&mut self, path: &ExprPath, message: String) {
        self.out.push(Diagnostic { path: path.clone(), message });
    }

    fn lookup(&self, v: &str) -> Option<Kind> {
        self.scope.iter().rev().find(|(n, _)| n == v).map(|(_, k)| *k)
    }

    fn check_term(&mut self, t: &LinTerm, path: &ExprPath) {
        for v in t.vars() {
            match self.lookup(v) {
                Some(Kind::Num) => {}
                Some(Kind::Str) => self.report(path, format!("{v} is a string variable, not a number variable")),
                None => self.report(path, format!("unbound number variable {v}")),
            }
        }
    }

    fn bind(&mut self, v: &str, kind: Kind, path: &ExprPath) {
        if self.lookup(v).is_some() {
            self.report(path, format!("variable {v} is already bound"));
        }
        self.scope.push((v.to_string(), kind));
    }

    fn visit(&mut self, e: &Expr, path: &ExprPath) {
        for t in e.terms() {
            self.check_term(t, path);
        }
        for p in e.preds() {
            if p.moduli().contains(&0) {
                self.report(path, "modulus must be at least 1".into());
            }
        }
        let mut bound = false;
        match e {
            Expr::Atom(w) => {
                if let Some(c) = w.chars().find(|c| !self.sigma.contains(*c)) {
                    self.report(path, format!("symbol not in alphabet: {c}"));
                }
            }
            Expr::Alph(syms, _) => {
                if syms.is_empty() {
                    self.report(path, "ALPH needs at least one symbol".into());
                }
                if let Some(c) = syms.iter().find(|c| !self.sigma.contains(**c)) {
                    self.report(path, format!("symbol not in alphabet: {c}"));
                }
            }
            Expr::Cons(items) if items.is_empty() => self.report(path, "CONS needs at least one item".into()),
            Expr::Range(i, j, _) => {
                let width = j.minus(i);
                if width.is_constant() && width.constant_part() < 0 {
                    self.report(path, format!("RANGE start {i} exceeds end {j}"));
                }
            }
            Expr::CountCmp { lhs_coeff, rhs_coeff, .. } => {
                if *lhs_coeff == 0 || *rhs_coeff == 0 {
                    self.report(path, "COUNT coefficient must be at least 1".into());
                }
            }
            Expr::ExistsNum(v, _) | Expr::ForallNum(v, _) => {
                self.bind(v, Kind::Num, path);
                bound = true;
            }
            Expr::ExistsStr(v, _) => {
                self.bind(v, Kind::Str, path);
                bound = true;
            }
            Expr::StrVar(v) => match self.lookup(v) {
                Some(Kind::Str) => {}
                Some(Kind::Num) => self.report(path, format!("{v} is a number variable, not a string variable")),
                None => self.report(path, format!("unbound string variable {v}")),
            },
            _ => {}
        }
        for (i, c) in e.children().into_iter().enumerate() {
            self.visit(c, &path.child(i));
        }
        if bound {
            self.scope.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Pred;

    fn ab() -> Alphabet {
        Alphabet::parse_list("a,b").unwrap()
    }

    #[test]
    fn alphabet_membership() {
        let ok = Expr::Alph(vec!['a', 'b'], Box::new(Expr::has(None, Expr::atom("aaa"))));
        assert_eq!(validate(&ok, &ab()), Ok(()));
        let bad = Expr::concat(Expr::atom("a"), Expr::atom("c"));
        let diags = validate(&bad, &ab()).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.starts_with("symbol not in alphabet"));
        assert_eq!(diags[0].path, ExprPath(vec![1]));
    }

    #[test]
    fn unbound_and_kinds() {
        let e = Expr::rep(Some(Pred::Eq(LinTerm::var("i"))), Expr::atom("a"));
        let diags = validate(&e, &ab()).unwrap_err();
        assert_eq!(diags[0].message, "unbound number variable i");
        assert!(validate(&Expr::exists("i", e.clone()), &ab()).is_ok());

        let mixed = Expr::ExistsStr("i".into(), Box::new(e));
        assert!(validate(&mixed, &ab()).is_err());
        let strvar = Expr::ExistsStr("u".into(), Box::new(Expr::StrVar("u".into())));
        assert!(validate(&strvar, &ab()).is_ok());
    }

    #[test]
    fn range_and_modulus() {
        let bad = Expr::Range(LinTerm::constant(3), LinTerm::constant(2), Box::new(Expr::atom("a")));
        assert!(validate(&bad, &ab()).is_err());
        let zero = Expr::rep(Some(Pred::Mod(LinTerm::constant(0), 0)), Expr::atom("a"));
        assert!(validate(&zero, &ab()).is_err());
    }

    #[test]
    fn path_resolution() {
        let e = Expr::concat(Expr::atom("a"), Expr::not(Expr::atom("b")));
        assert_eq!(ExprPath(vec![1, 0]).resolve(&e), Some(&Expr::atom("b")));
        assert_eq!(ExprPath(vec![2]).resolve(&e), None);
        assert_eq!(ExprPath(vec![1, 0]).to_string(), "1.0");
    }
}
