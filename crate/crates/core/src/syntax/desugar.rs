use std::collections::BTreeSet;

use super::{Alphabet, CoreExpr, Expr, LinTerm, NumPredicate, Pred, Rel, SyntaxError};

/// Lowers a closed surface expression to core syntax.
///
/// Fails with [`SyntaxError::UnboundVariable`] if the result still has free
/// variables; use [`desugar`] to lower open sub-expressions.
pub fn expand_sugar(e: &Expr, sigma: &Alphabet) -> Result<CoreExpr, SyntaxError> {
    let core = desugar(e, sigma);
    let (nums, strs) = core.free_vars();
    if let Some(v) = nums.into_iter().chain(strs).next() {
        return Err(SyntaxError::UnboundVariable(v));
    }
    Ok(core)
}

/// Lowers a surface expression to core syntax without checking closedness.
pub fn desugar(e: &Expr, sigma: &Alphabet) -> CoreExpr {
    let mut used = BTreeSet::new();
    e.all_names(&mut used);
    let mut cx = Desugar { sigma, used };
    cx.lower(e)
}

/// Picks a variable name that does not occur in `used` and records it.
pub fn fresh_name(used: &mut BTreeSet<String>) -> String {
    const PREFERRED: [&str; 6] = ["x", "y", "z", "k", "n", "m"];
    let name = PREFERRED
        .iter()
        .map(|s| s.to_string())
        .find(|s| !used.contains(s))
        .unwrap_or_else(|| (1..).map(|i| format!("x{i}")).find(|s| !used.contains(s)).unwrap());
    used.insert(name.clone());
    name
}

struct Desugar<'a> {
    sigma: &'a Alphabet,
    used: BTreeSet<String>,
}

fn pred_or_default(p: &Option<Pred>, default: NumPredicate) -> NumPredicate {
    p.as_ref().map(Pred::to_core).unwrap_or(default)
}

fn at_least_one() -> NumPredicate {
    NumPredicate::Geq(LinTerm::constant(1))
}

impl Desugar<'_> {
    fn any_symbol(&self) -> CoreExpr {
        CoreExpr::or_all(self.sigma.chars().map(|c| CoreExpr::atom(c.to_string())).collect())
    }

    fn len(&self, p: NumPredicate) -> CoreExpr {
        CoreExpr::rep(p, self.any_symbol())
    }

    fn lower(&mut self, e: &Expr) -> CoreExpr {
        match e {
            Expr::Atom(w) => CoreExpr::Atom(w.clone()),
            Expr::Top => CoreExpr::top(),
            Expr::Bot => CoreExpr::bot(),
            Expr::Not(a) => CoreExpr::not(self.lower(a)),
            Expr::And(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                CoreExpr::and(a, b)
            }
            Expr::Or(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                CoreExpr::or(a, b)
            }
            Expr::Implies(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                CoreExpr::or(CoreExpr::not(a), b)
            }
            Expr::Iff(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                CoreExpr::or(CoreExpr::and(a.clone(), b.clone()), CoreExpr::and(CoreExpr::not(a), CoreExpr::not(b)))
            }
            Expr::Concat(a, b) => {
                let (a, b) = (self.lower(a), self.lower(b));
                CoreExpr::concat(a, b)
            }
            Expr::Rep(p, a) => CoreExpr::rep(pred_or_default(p, NumPredicate::always()), self.lower(a)),
            Expr::Has(p, a) => CoreExpr::has(pred_or_default(p, at_least_one()), self.lower(a)),
            Expr::Begin(p, a) => {
                // REP(P, a) . (eps | !(a . TOP))
                let phi = self.lower(a);
                let rep = CoreExpr::rep(pred_or_default(p, at_least_one()), phi.clone());
                let rest = CoreExpr::or(CoreExpr::eps(), CoreExpr::not(CoreExpr::concat(phi, CoreExpr::top())));
                CoreExpr::concat(rep, rest)
            }
            Expr::End(p, a) => {
                // (eps | !(TOP . a)) . REP(P, a)
                let phi = self.lower(a);
                let rep = CoreExpr::rep(pred_or_default(p, at_least_one()), phi.clone());
                let rest = CoreExpr::or(CoreExpr::eps(), CoreExpr::not(CoreExpr::concat(CoreExpr::top(), phi)));
                CoreExpr::concat(rest, rep)
            }
            Expr::Len(p) => self.len(p.to_core()),
            Expr::Alph(syms, a) => {
                let any = CoreExpr::or_all(syms.iter().map(|c| CoreExpr::atom(c.to_string())).collect());
                let body = self.lower(a);
                CoreExpr::and(CoreExpr::rep(NumPredicate::always(), any), body)
            }
            Expr::Alternate(a, b) => {
                // (a | eps) . REP(b . a) . (b | eps)
                let (a, b) = (self.lower(a), self.lower(b));
                let head = CoreExpr::or(a.clone(), CoreExpr::eps());
                let mid = CoreExpr::rep(NumPredicate::always(), CoreExpr::concat(b.clone(), a));
                let tail = CoreExpr::or(b, CoreExpr::eps());
                CoreExpr::concat(CoreExpr::concat(head, mid), tail)
            }
            Expr::Cons(items) => {
                let parts: Vec<(NumPredicate, CoreExpr)> =
                    items.iter().map(|(p, x)| (p.to_core(), self.lower(x))).collect();
                let any = CoreExpr::or_all(parts.iter().map(|(_, x)| x.clone()).collect());
                let mut acc = CoreExpr::rep(NumPredicate::always(), any);
                for (p, x) in parts {
                    acc = CoreExpr::and(acc, CoreExpr::has(p, x));
                }
                acc
            }
            Expr::Range(i, j, a) => self.range(i, j, a),
            Expr::At(i, a) => self.range(i, i, a),
            Expr::CountCmp { lhs_coeff, lhs, rel, rhs_coeff, rhs } => {
                let (phi, psi) = (self.lower(lhs), self.lower(rhs));
                self.count_cmp(*lhs_coeff as i64, phi, *rel, *rhs_coeff as i64, psi)
            }
            Expr::ExistsNum(v, a) => CoreExpr::exists(v.clone(), self.lower(a)),
            Expr::ForallNum(v, a) => CoreExpr::not(CoreExpr::exists(v.clone(), CoreExpr::not(self.lower(a)))),
            Expr::ExistsStr(v, a) => CoreExpr::ExistsStr(v.clone(), Box::new(self.lower(a))),
            Expr::StrVar(v) => CoreExpr::StrVar(v.clone()),
            Expr::Reverse(a) => CoreExpr::Reverse(Box::new(self.lower(a))),
            Expr::Palindrome => {
                let w = fresh_name(&mut self.used);
                let short = self.len(NumPredicate::not(NumPredicate::Geq(LinTerm::constant(2))));
                let body = CoreExpr::concat(
                    CoreExpr::concat(CoreExpr::StrVar(w.clone()), short),
                    CoreExpr::Reverse(Box::new(CoreExpr::StrVar(w.clone()))),
                );
                CoreExpr::ExistsStr(w, Box::new(body))
            }
        }
    }

    /// `LEN=i-1 . (a & LEN=j-i+1) . TOP`
    fn range(&mut self, i: &LinTerm, j: &LinTerm, a: &Expr) -> CoreExpr {
        let before = self.len(NumPredicate::eq(i.offset(-1)));
        let width = self.len(NumPredicate::eq(j.minus(i).offset(1)));
        let mid = CoreExpr::and(self.lower(a), width);
        CoreExpr::concat(CoreExpr::concat(before, mid), CoreExpr::top())
    }

    /// `c*#phi REL d*#psi` via a fresh counting variable.
    fn count_cmp(&mut self, c: i64, phi: CoreExpr, rel: Rel, d: i64, psi: CoreExpr) -> CoreExpr {
        if c == 1 {
            return self.count_cmp_unit(phi, rel, d, psi);
        }
        if d == 1 {
            let flipped = match rel {
                Rel::Lt => Rel::Gt,
                Rel::Le => Rel::Ge,
                Rel::Eq => Rel::Eq,
                Rel::Ge => Rel::Le,
                Rel::Gt => Rel::Lt,
            };
            return self.count_cmp_unit(psi, flipped, c, phi);
        }
        // General case: #psi = c*y + r with 0 <= r < c, and the comparison
        // c*#phi REL d*(c*y + r) becomes (#phi - d*y) REL d*r/c.
        let y = fresh_name(&mut self.used);
        let dy = LinTerm::scaled_var(y.clone(), d);
        let mut disjuncts = Vec::new();
        for r in 0..c {
            let dr = d * r;
            let floor = dr.div_euclid(c);
            let ceil = -(-dr).div_euclid(c);
            let on_phi = match rel {
                Rel::Gt => NumPredicate::Geq(dy.offset(floor + 1)),
                Rel::Ge => NumPredicate::Geq(dy.offset(ceil)),
                Rel::Lt => NumPredicate::not(NumPredicate::Geq(dy.offset(ceil))),
                Rel::Le => NumPredicate::not(NumPredicate::Geq(dy.offset(floor + 1))),
                Rel::Eq => {
                    if dr % c != 0 {
                        continue;
                    }
                    NumPredicate::eq(dy.offset(dr / c))
                }
            };
            let on_psi = NumPredicate::eq(LinTerm::scaled_var(y.clone(), c).offset(r));
            disjuncts.push(CoreExpr::and(CoreExpr::has(on_phi, phi.clone()), CoreExpr::has(on_psi, psi.clone())));
        }
        CoreExpr::exists(y, CoreExpr::or_all(disjuncts))
    }

    /// `#phi REL d*#psi` as `EXISTS x [HAS(REL d*x, phi) & HAS(bound x, psi)]`.
    fn count_cmp_unit(&mut self, phi: CoreExpr, rel: Rel, d: i64, psi: CoreExpr) -> CoreExpr {
        let x = fresh_name(&mut self.used);
        let dx = LinTerm::scaled_var(x.clone(), d);
        let xt = LinTerm::var(x.clone());
        let le_x = NumPredicate::not(NumPredicate::Geq(xt.offset(1)));
        let ge_x = NumPredicate::Geq(xt.clone());
        let (on_phi, on_psi) = match rel {
            Rel::Gt => (NumPredicate::Geq(dx.offset(1)), le_x),
            Rel::Ge => (NumPredicate::Geq(dx), le_x),
            Rel::Lt => (NumPredicate::not(NumPredicate::Geq(dx)), ge_x),
            Rel::Le => (NumPredicate::not(NumPredicate::Geq(dx.offset(1))), ge_x),
            Rel::Eq => (NumPredicate::eq(dx), NumPredicate::eq(xt)),
        };
        CoreExpr::exists(x, CoreExpr::and(CoreExpr::has(on_phi, phi), CoreExpr::has(on_psi, psi)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::parse_list("a,b").unwrap()
    }

    #[test]
    fn begin_expansion() {
        let e = Expr::Begin(Some(Pred::Even), Box::new(Expr::atom("a")));
        let expected = CoreExpr::concat(
            CoreExpr::rep(Pred::Even.to_core(), CoreExpr::atom("a")),
            CoreExpr::or(CoreExpr::eps(), CoreExpr::not(CoreExpr::concat(CoreExpr::atom("a"), CoreExpr::top()))),
        );
        assert_eq!(expand_sugar(&e, &ab()).unwrap(), expected);
    }

    #[test]
    fn count_greater_expansion() {
        let e = Expr::CountCmp {
            lhs_coeff: 1,
            lhs: Box::new(Expr::atom("b")),
            rel: Rel::Gt,
            rhs_coeff: 1,
            rhs: Box::new(Expr::atom("a")),
        };
        let x = LinTerm::var("x");
        let expected = CoreExpr::exists(
            "x",
            CoreExpr::and(
                CoreExpr::has(Pred::Gt(x.clone()).to_core(), CoreExpr::atom("b")),
                CoreExpr::has(Pred::Le(x).to_core(), CoreExpr::atom("a")),
            ),
        );
        assert_eq!(expand_sugar(&e, &ab()).unwrap(), expected);
    }

    #[test]
    fn core_input_is_unchanged() {
        let core = CoreExpr::has(Pred::Eq(LinTerm::constant(3)).to_core(), CoreExpr::atom("a"));
        assert_eq!(expand_sugar(&core.to_surface(), &ab()).unwrap(), core);
    }

    #[test]
    fn palindrome_shape() {
        let core = expand_sugar(&Expr::Palindrome, &ab()).unwrap();
        let CoreExpr::ExistsStr(w, body) = &core else { panic!("expected string quantifier") };
        let factors = body.concat_factors();
        assert_eq!(factors.len(), 3);
        assert_eq!(factors[0], &CoreExpr::StrVar(w.clone()));
        assert_eq!(factors[2], &CoreExpr::Reverse(Box::new(CoreExpr::StrVar(w.clone()))));
    }

    #[test]
    fn fresh_names_avoid_user_names() {
        let e = Expr::exists(
            "x",
            Expr::CountCmp {
                lhs_coeff: 1,
                lhs: Box::new(Expr::rep(Some(Pred::Eq(LinTerm::var("x"))), Expr::atom("a"))),
                rel: Rel::Ge,
                rhs_coeff: 1,
                rhs: Box::new(Expr::atom("b")),
            },
        );
        let core = expand_sugar(&e, &ab()).unwrap();
        let CoreExpr::ExistsNum(_, inner) = core else { panic!() };
        assert!(matches!(inner.as_ref(), CoreExpr::ExistsNum(v, _) if v == "y"));
    }

    #[test]
    fn unbound_is_reported() {
        let e = Expr::rep(Some(Pred::Eq(LinTerm::var("i"))), Expr::atom("a"));
        assert_eq!(expand_sugar(&e, &ab()), Err(SyntaxError::UnboundVariable("i".into())));
        assert_eq!(desugar(&e, &ab()).free_vars().0.into_iter().collect::<Vec<_>>(), vec!["i"]);
    }
}
