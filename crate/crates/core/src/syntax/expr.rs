use std::collections::{BTreeMap, BTreeSet};

use super::{LinTerm, NumPredicate, Pred};

/// Relation used in `c*COUNT(e1) REL d*COUNT(e2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Rel::Lt => a < b,
            Rel::Le => a <= b,
            Rel::Eq => a == b,
            Rel::Ge => a >= b,
            Rel::Gt => a > b,
        }
    }
}

/// Surface (extended) expression tree, as parsed and rendered.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    /// A word over the alphabet; the empty string is epsilon.
    Atom(String),
    Top,
    Bot,
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
    Concat(Box<Expr>, Box<Expr>),
    Rep(Option<Pred>, Box<Expr>),
    Has(Option<Pred>, Box<Expr>),
    Begin(Option<Pred>, Box<Expr>),
    End(Option<Pred>, Box<Expr>),
    Len(Pred),
    Alph(Vec<char>, Box<Expr>),
    Alternate(Box<Expr>, Box<Expr>),
    Cons(Vec<(Pred, Expr)>),
    Range(LinTerm, LinTerm, Box<Expr>),
    At(LinTerm, Box<Expr>),
    CountCmp {
        lhs_coeff: u32,
        lhs: Box<Expr>,
        rel: Rel,
        rhs_coeff: u32,
        rhs: Box<Expr>,
    },
    ExistsNum(String, Box<Expr>),
    ForallNum(String, Box<Expr>),
    ExistsStr(String, Box<Expr>),
    StrVar(String),
    Reverse(Box<Expr>),
    Palindrome,
}

impl Expr {
    pub fn atom(w: impl Into<String>) -> Expr {
        Expr::Atom(w.into())
    }

    pub fn eps() -> Expr {
        Expr::Atom(String::new())
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Expr, b: Expr) -> Expr {
        Expr::Concat(Box::new(a), Box::new(b))
    }

    pub fn rep(p: Option<Pred>, e: Expr) -> Expr {
        Expr::Rep(p, Box::new(e))
    }

    pub fn has(p: Option<Pred>, e: Expr) -> Expr {
        Expr::Has(p, Box::new(e))
    }

    pub fn exists(v: impl Into<String>, e: Expr) -> Expr {
        Expr::ExistsNum(v.into(), Box::new(e))
    }

    /// Direct sub-expressions in a fixed order; paths index into this list.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Atom(_) | Expr::Top | Expr::Bot | Expr::Len(_) | Expr::StrVar(_) | Expr::Palindrome => vec![],
            Expr::Not(e)
            | Expr::Rep(_, e)
            | Expr::Has(_, e)
            | Expr::Begin(_, e)
            | Expr::End(_, e)
            | Expr::Alph(_, e)
            | Expr::Range(_, _, e)
            | Expr::At(_, e)
            | Expr::ExistsNum(_, e)
            | Expr::ForallNum(_, e)
            | Expr::ExistsStr(_, e)
            | Expr::Reverse(e) => vec![e],
            Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Implies(a, b)
            | Expr::Iff(a, b)
            | Expr::Concat(a, b)
            | Expr::Alternate(a, b) => vec![a, b],
            Expr::Cons(items) => items.iter().map(|(_, e)| e).collect(),
            Expr::CountCmp { lhs, rhs, .. } => vec![lhs, rhs],
        }
    }

    /// Predicates attached directly to this node.
    pub fn preds(&self) -> Vec<&Pred> {
        match self {
            Expr::Rep(Some(p), _) | Expr::Has(Some(p), _) | Expr::Begin(Some(p), _) | Expr::End(Some(p), _) => {
                vec![p]
            }
            Expr::Len(p) => vec![p],
            Expr::Cons(items) => items.iter().map(|(p, _)| p).collect(),
            _ => vec![],
        }
    }

    /// Terms attached directly to this node, including those inside predicates.
    pub fn terms(&self) -> Vec<&LinTerm> {
        let mut out: Vec<&LinTerm> = self.preds().into_iter().flat_map(|p| p.terms()).collect();
        match self {
            Expr::Range(i, j, _) => {
                out.push(i);
                out.push(j);
            }
            Expr::At(i, _) => out.push(i),
            _ => {}
        }
        out
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Expr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(Expr::depth).max().unwrap_or(0)
    }

    /// Every variable name occurring anywhere (bound or free, both namespaces).
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        for t in self.terms() {
            out.extend(t.vars().map(str::to_string));
        }
        match self {
            Expr::ExistsNum(v, _) | Expr::ForallNum(v, _) | Expr::ExistsStr(v, _) | Expr::StrVar(v) => {
                out.insert(v.clone());
            }
            _ => {}
        }
        for c in self.children() {
            c.all_names(out);
        }
    }
}

/// Fully desugared expression tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoreExpr {
    Atom(String),
    Not(Box<CoreExpr>),
    Or(Box<CoreExpr>, Box<CoreExpr>),
    Concat(Box<CoreExpr>, Box<CoreExpr>),
    Rep(NumPredicate, Box<CoreExpr>),
    Has(NumPredicate, Box<CoreExpr>),
    ExistsNum(String, Box<CoreExpr>),
    ExistsStr(String, Box<CoreExpr>),
    StrVar(String),
    Reverse(Box<CoreExpr>),
}

impl CoreExpr {
    pub fn atom(w: impl Into<String>) -> CoreExpr {
        CoreExpr::Atom(w.into())
    }

    pub fn eps() -> CoreExpr {
        CoreExpr::Atom(String::new())
    }

    pub fn not(e: CoreExpr) -> CoreExpr {
        CoreExpr::Not(Box::new(e))
    }

    pub fn or(a: CoreExpr, b: CoreExpr) -> CoreExpr {
        CoreExpr::Or(Box::new(a), Box::new(b))
    }

    /// `a & b` as `!(!a | !b)`.
    pub fn and(a: CoreExpr, b: CoreExpr) -> CoreExpr {
        CoreExpr::not(CoreExpr::or(CoreExpr::not(a), CoreExpr::not(b)))
    }

    pub fn concat(a: CoreExpr, b: CoreExpr) -> CoreExpr {
        CoreExpr::Concat(Box::new(a), Box::new(b))
    }

    pub fn rep(p: NumPredicate, e: CoreExpr) -> CoreExpr {
        CoreExpr::Rep(p, Box::new(e))
    }

    pub fn has(p: NumPredicate, e: CoreExpr) -> CoreExpr {
        CoreExpr::Has(p, Box::new(e))
    }

    pub fn exists(v: impl Into<String>, e: CoreExpr) -> CoreExpr {
        CoreExpr::ExistsNum(v.into(), Box::new(e))
    }

    /// `TOP` as `eps | !eps`.
    pub fn top() -> CoreExpr {
        CoreExpr::or(CoreExpr::eps(), CoreExpr::not(CoreExpr::eps()))
    }

    pub fn bot() -> CoreExpr {
        CoreExpr::not(CoreExpr::top())
    }

    pub fn is_top(&self) -> bool {
        *self == CoreExpr::top()
    }

    /// Recognizes `a & b` in its `!(!a | !b)` encoding.
    pub fn as_and(&self) -> Option<(&CoreExpr, &CoreExpr)> {
        if let CoreExpr::Not(inner) = self {
            if let CoreExpr::Or(a, b) = inner.as_ref() {
                if let (CoreExpr::Not(a), CoreExpr::Not(b)) = (a.as_ref(), b.as_ref()) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn children(&self) -> Vec<&CoreExpr> {
        match self {
            CoreExpr::Atom(_) | CoreExpr::StrVar(_) => vec![],
            CoreExpr::Not(e)
            | CoreExpr::Rep(_, e)
            | CoreExpr::Has(_, e)
            | CoreExpr::ExistsNum(_, e)
            | CoreExpr::ExistsStr(_, e)
            | CoreExpr::Reverse(e) => vec![e],
            CoreExpr::Or(a, b) | CoreExpr::Concat(a, b) => vec![a, b],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(CoreExpr::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(CoreExpr::depth).max().unwrap_or(0)
    }

    /// Flattens nested concatenations into their factor list.
    pub fn concat_factors(&self) -> Vec<&CoreExpr> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a CoreExpr, out: &mut Vec<&'a CoreExpr>) {
            if let CoreExpr::Concat(a, b) = e {
                go(a, out);
                go(b, out);
            } else {
                out.push(e);
            }
        }
        go(self, &mut out);
        out
    }

    pub fn concat_all(factors: Vec<CoreExpr>) -> CoreExpr {
        let mut it = factors.into_iter();
        let first = it.next().unwrap_or_else(CoreExpr::eps);
        it.fold(first, CoreExpr::concat)
    }

    pub fn or_all(items: Vec<CoreExpr>) -> CoreExpr {
        let mut it = items.into_iter();
        match it.next() {
            Some(first) => it.fold(first, CoreExpr::or),
            None => CoreExpr::bot(),
        }
    }

    /// Free number and string variables.
    pub fn free_vars(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut nums = BTreeSet::new();
        let mut strs = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut Vec::new(), &mut nums, &mut strs);
        (nums, strs)
    }

    fn collect_free(
        &self,
        bound_nums: &mut Vec<String>,
        bound_strs: &mut Vec<String>,
        nums: &mut BTreeSet<String>,
        strs: &mut BTreeSet<String>,
    ) {
        match self {
            CoreExpr::Rep(p, _) | CoreExpr::Has(p, _) => {
                for v in p.vars() {
                    if !bound_nums.contains(&v) {
                        nums.insert(v);
                    }
                }
            }
            CoreExpr::StrVar(v) => {
                if !bound_strs.contains(v) {
                    strs.insert(v.clone());
                }
            }
            _ => {}
        }
        match self {
            CoreExpr::ExistsNum(v, body) => {
                bound_nums.push(v.clone());
                body.collect_free(bound_nums, bound_strs, nums, strs);
                bound_nums.pop();
            }
            CoreExpr::ExistsStr(v, body) => {
                bound_strs.push(v.clone());
                body.collect_free(bound_nums, bound_strs, nums, strs);
                bound_strs.pop();
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound_nums, bound_strs, nums, strs);
                }
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        let (n, s) = self.free_vars();
        n.is_empty() && s.is_empty()
    }

    pub fn has_quantifier(&self) -> bool {
        match self {
            CoreExpr::ExistsNum(..) | CoreExpr::ExistsStr(..) | CoreExpr::StrVar(_) => true,
            _ => self.children().into_iter().any(CoreExpr::has_quantifier),
        }
    }

    /// All predicates in the tree.
    pub fn predicates(&self) -> Vec<&NumPredicate> {
        let mut out = Vec::new();
        fn go<'a>(e: &'a CoreExpr, out: &mut Vec<&'a NumPredicate>) {
            if let CoreExpr::Rep(p, _) | CoreExpr::Has(p, _) = e {
                out.push(p);
            }
            for c in e.children() {
                go(c, out);
            }
        }
        go(self, &mut out);
        out
    }

    /// Embeds the core tree back into the surface syntax.
    pub fn to_surface(&self) -> Expr {
        match self {
            CoreExpr::Atom(w) => Expr::Atom(w.clone()),
            CoreExpr::Not(e) => Expr::not(e.to_surface()),
            CoreExpr::Or(a, b) => Expr::or(a.to_surface(), b.to_surface()),
            CoreExpr::Concat(a, b) => Expr::concat(a.to_surface(), b.to_surface()),
            CoreExpr::Rep(p, e) => Expr::rep(Some(p.to_surface()), e.to_surface()),
            CoreExpr::Has(p, e) => Expr::has(Some(p.to_surface()), e.to_surface()),
            CoreExpr::ExistsNum(v, e) => Expr::ExistsNum(v.clone(), Box::new(e.to_surface())),
            CoreExpr::ExistsStr(v, e) => Expr::ExistsStr(v.clone(), Box::new(e.to_surface())),
            CoreExpr::StrVar(v) => Expr::StrVar(v.clone()),
            CoreExpr::Reverse(e) => Expr::Reverse(Box::new(e.to_surface())),
        }
    }

    /// Renames bound variables to `v0, v1, ...` in binding order, so that
    /// alpha-equivalent trees compare equal.
    pub fn canonical_binders(&self) -> CoreExpr {
        fn go(e: &CoreExpr, env: &mut Vec<(String, String)>, next: &mut usize) -> CoreExpr {
            let lookup = |env: &Vec<(String, String)>, v: &str| {
                env.iter().rev().find(|(from, _)| from == v).map(|(_, to)| to.clone())
            };
            match e {
                CoreExpr::Rep(p, b) | CoreExpr::Has(p, b) => {
                    let p2 = p.map_terms(&|t| {
                        let mut out = t.clone();
                        for v in t.vars() {
                            if let Some(to) = lookup(env, v) {
                                out = out.rename(v, &format!("\u{0}{to}"));
                            }
                        }
                        let names: Vec<String> = out.vars().map(str::to_string).collect();
                        for v in names {
                            if let Some(stripped) = v.strip_prefix('\u{0}') {
                                out = out.rename(&v, stripped);
                            }
                        }
                        out
                    });
                    let b2 = go(b, env, next);
                    if matches!(e, CoreExpr::Rep(..)) {
                        CoreExpr::rep(p2, b2)
                    } else {
                        CoreExpr::has(p2, b2)
                    }
                }
                CoreExpr::ExistsNum(v, b) | CoreExpr::ExistsStr(v, b) => {
                    let fresh = format!("v{next}");
                    *next += 1;
                    env.push((v.clone(), fresh.clone()));
                    let b2 = go(b, env, next);
                    env.pop();
                    if matches!(e, CoreExpr::ExistsNum(..)) {
                        CoreExpr::exists(fresh, b2)
                    } else {
                        CoreExpr::ExistsStr(fresh, Box::new(b2))
                    }
                }
                CoreExpr::StrVar(v) => CoreExpr::StrVar(lookup(env, v).unwrap_or_else(|| v.clone())),
                CoreExpr::Atom(w) => CoreExpr::Atom(w.clone()),
                CoreExpr::Not(a) => CoreExpr::not(go(a, env, next)),
                CoreExpr::Reverse(a) => CoreExpr::Reverse(Box::new(go(a, env, next))),
                CoreExpr::Or(a, b) => CoreExpr::or(go(a, env, next), go(b, env, next)),
                CoreExpr::Concat(a, b) => CoreExpr::concat(go(a, env, next), go(b, env, next)),
            }
        }
        go(self, &mut Vec::new(), &mut 0)
    }
}

/// Values for free number variables and free string variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Interpretation {
    pub nums: BTreeMap<String, u64>,
    pub strs: BTreeMap<String, String>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_num(mut self, name: impl Into<String>, value: u64) -> Self {
        self.nums.insert(name.into(), value);
        self
    }

    pub fn with_str(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.strs.insert(name.into(), value.into());
        self
    }
}
