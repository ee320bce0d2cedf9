//! Concrete ASCII syntax: `parse` text into [`Expr`] and `render` it back.
//!
//! Precedence from loosest to tightest: `ALPH(..):` (scope runs to the end of
//! the enclosing expression), `<->`, `->` (right associative), `|`, `&`, `.`,
//! prefix `!`, then primaries. Quantifiers are bracket-delimited primaries.

use std::fmt;

use thiserror::Error;

use crate::syntax::{Expr, LinTerm, Pred, Rel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at {}..{}: {message} (expected {})", span.start, span.end, expected.join(", "))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

const KEYWORDS: &[&str] = &[
    "EXISTS",
    "FORALL",
    "EXISTSSTR",
    "REP",
    "HAS",
    "BEGIN",
    "END",
    "LEN",
    "ALPH",
    "ALTERNATE",
    "CONS",
    "RANGE",
    "AT",
    "REVERSE",
    "PALINDROME",
    "COUNT",
    "TOP",
    "BOT",
    "EVEN",
    "ODD",
    "eps",
    "mod",
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Kw(&'static str),
    Quoted(String),
    Int(i64),
    StrVar(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    Dot,
    Bar,
    Amp,
    Bang,
    Arrow,
    Iff,
    Eq,
    EqEq,
    Ge,
    Gt,
    Le,
    Lt,
    Plus,
    Minus,
    Star,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("word '{w}'"),
            Tok::Kw(k) => k.to_string(),
            Tok::Quoted(w) => format!("'{w}'"),
            Tok::Int(n) => n.to_string(),
            Tok::StrVar(v) => format!("${v}"),
            Tok::Eof => "end of input".into(),
            other => format!("'{}'", other.punct()),
        }
    }

    fn punct(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::Amp => "&",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Eq => "=",
            Tok::EqEq => "==",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Lt => "<",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            _ => "?",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut chars = text.char_indices().peekable();
    let ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let err = |end: usize, message: String| ParseError {
            span: SourceSpan { start, end },
            message,
            expected: vec!["token".into()],
        };
        let rest = &text[start..];
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let len = rest.find(|ch: char| !ident_char(ch)).unwrap_or(rest.len());
            let word = &rest[..len];
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => (Tok::Kw(k), len),
                None => (Tok::Word(word.to_string()), len),
            }
        } else if c.is_ascii_digit() {
            let len = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..len].parse::<i64>().map_err(|_| err(start + len, "integer literal too large".into()))?;
            (Tok::Int(n), len)
        } else if c == '$' {
            let len = rest[1..].find(|ch: char| !ident_char(ch)).unwrap_or(rest.len() - 1);
            if len == 0 {
                return Err(err(start + 1, "expected a variable name after '$'".into()));
            }
            (Tok::StrVar(rest[1..1 + len].to_string()), len + 1)
        } else if c == '\'' {
            let close = rest[1..].find('\'').ok_or_else(|| err(text.len(), "unterminated quoted word".into()))?;
            (Tok::Quoted(rest[1..1 + close].to_string()), close + 2)
        } else {
            let two = bytes.get(start..start + 2).unwrap_or(&[]);
            let three = bytes.get(start..start + 3).unwrap_or(&[]);
            if three == b"<->" {
                (Tok::Iff, 3)
            } else if two == b"->" {
                (Tok::Arrow, 2)
            } else if two == b"==" {
                (Tok::EqEq, 2)
            } else if two == b">=" {
                (Tok::Ge, 2)
            } else if two == b"<=" {
                (Tok::Le, 2)
            } else {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    '.' | '∘' => Tok::Dot,
                    '|' | '∨' => Tok::Bar,
                    '&' | '∧' => Tok::Amp,
                    '!' | '¬' => Tok::Bang,
                    '→' => Tok::Arrow,
                    '↔' => Tok::Iff,
                    '=' => Tok::Eq,
                    '≡' => Tok::EqEq,
                    '>' => Tok::Gt,
                    '≥' => Tok::Ge,
                    '<' => Tok::Lt,
                    '≤' => Tok::Le,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' | '·' => Tok::Star,
                    'ε' => Tok::Kw("eps"),
                    '∃' => Tok::Kw("EXISTS"),
                    '∀' => Tok::Kw("FORALL"),
                    '⊤' => Tok::Kw("TOP"),
                    '⊥' => Tok::Kw("BOT"),
                    _ => return Err(err(start + c.len_utf8(), format!("unexpected character {c:?}"))),
                };
                (tok, c.len_utf8())
            }
        };
        out.push((tok, SourceSpan { start, end: start + len }));
        while chars.peek().is_some_and(|&(i, _)| i < start + len) {
            chars.next();
        }
    }
    out.push((Tok::Eof, SourceSpan { start: text.len(), end: text.len() }));
    Ok(out)
}

/// Byte spans of the tokens of `text`, excluding the end marker.
pub fn token_spans(text: &str) -> Result<Vec<SourceSpan>, ParseError> {
    let mut toks = lex(text)?;
    toks.pop();
    Ok(toks.into_iter().map(|(_, s)| s).collect())
}

/// Parses a surface expression.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let e = p.expr()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(e)
}

/// Parses a standalone number predicate such as `>=2 & EVEN`.
pub fn parse_pred(text: &str) -> Result<Pred, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let pr = p.pred()?;
    p.expect(Tok::Eof, "end of input")?;
    Ok(pr)
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

/// Keeps whichever error got further into the input, merging expectations on ties.
fn furthest(a: ParseError, b: ParseError) -> ParseError {
    match a.span.start.cmp(&b.span.start) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            let mut out = a;
            for x in b.expected {
                if !out.expected.contains(&x) {
                    out.expected.push(x);
                }
            }
            out
        }
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let (tok, span) = &self.toks[self.pos];
        ParseError {
            span: *span,
            message: format!("unexpected {}", tok.describe()),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.error(&[what]))
        }
    }

    fn expect_kw(&mut self, kw: &'static str) -> PResult<()> {
        self.expect(Tok::Kw(kw), kw)
    }

    fn var_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Word(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.error(&["variable name"])),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = Expr::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Bar) {
            lhs = Expr::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.concat()?;
        while self.eat(&Tok::Amp) {
            lhs = Expr::and(lhs, self.concat()?);
        }
        Ok(lhs)
    }

    fn concat(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Dot) {
            lhs = Expr::concat(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Bang) {
            return Ok(Expr::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Expr> {
        const EXPECTED: &[&str] = &["expression"];
        let tok = self.peek().clone();
        match tok {
            Tok::Word(w) => {
                if !w.chars().all(|c| c.is_ascii_alphabetic()) {
                    let mut e = self.error(EXPECTED);
                    e.message = format!("'{w}' is not a word over letters");
                    return Err(e);
                }
                self.bump();
                Ok(Expr::Atom(w))
            }
            Tok::Quoted(w) => {
                if !w.chars().all(|c| c.is_ascii_alphabetic()) {
                    let mut e = self.error(EXPECTED);
                    e.message = format!("'{w}' is not a word over letters");
                    return Err(e);
                }
                self.bump();
                Ok(Expr::Atom(w))
            }
            Tok::StrVar(v) => {
                self.bump();
                Ok(Expr::StrVar(v))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Int(_) => self.count_cmp(),
            Tok::Kw(kw) => match kw {
                "eps" => {
                    self.bump();
                    Ok(Expr::eps())
                }
                "TOP" => {
                    self.bump();
                    Ok(Expr::Top)
                }
                "BOT" => {
                    self.bump();
                    Ok(Expr::Bot)
                }
                "PALINDROME" => {
                    self.bump();
                    Ok(Expr::Palindrome)
                }
                "REP" | "HAS" | "BEGIN" | "END" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let (p, e) = self.optional_pred_arg()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(match kw {
                        "REP" => Expr::Rep(p, Box::new(e)),
                        "HAS" => Expr::Has(p, Box::new(e)),
                        "BEGIN" => Expr::Begin(p, Box::new(e)),
                        _ => Expr::End(p, Box::new(e)),
                    })
                }
                "LEN" => {
                    self.bump();
                    Ok(Expr::Len(self.pred_unary()?))
                }
                "ALPH" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let mut syms = Vec::new();
                    loop {
                        let t = self.peek().clone();
                        let word = match t {
                            Tok::Word(w) | Tok::Quoted(w) => w,
                            Tok::Kw(k) => k.to_string(),
                            _ => return Err(self.error(&["alphabet symbol"])),
                        };
                        let mut cs = word.chars();
                        match (cs.next(), cs.next()) {
                            (Some(c), None) if c.is_ascii_alphabetic() => syms.push(c),
                            _ => return Err(self.error(&["single-letter alphabet symbol"])),
                        }
                        self.bump();
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "')'")?;
                    self.expect(Tok::Colon, "':'")?;
                    let body = self.expr()?;
                    Ok(Expr::Alph(syms, Box::new(body)))
                }
                "ALTERNATE" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let a = self.expr()?;
                    self.expect(Tok::Comma, "','")?;
                    let b = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Alternate(Box::new(a), Box::new(b)))
                }
                "CONS" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let mut items = Vec::new();
                    loop {
                        let p = self.pred()?;
                        self.expect(Tok::Comma, "','")?;
                        let e = self.expr()?;
                        items.push((p, e));
                        if !self.eat(&Tok::Semi) {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Cons(items))
                }
                "RANGE" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let i = self.index_term()?;
                    self.expect(Tok::Comma, "','")?;
                    let j = self.index_term()?;
                    self.expect(Tok::Comma, "','")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Range(i, j, Box::new(e)))
                }
                "AT" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let i = self.index_term()?;
                    self.expect(Tok::Comma, "','")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::At(i, Box::new(e)))
                }
                "REVERSE" => {
                    self.bump();
                    self.expect(Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(Expr::Reverse(Box::new(e)))
                }
                "COUNT" => self.count_cmp(),
                "EXISTS" | "FORALL" | "EXISTSSTR" => {
                    self.bump();
                    let v = self.var_name()?;
                    let body = if matches!(self.peek(), Tok::Kw("EXISTS" | "FORALL" | "EXISTSSTR")) {
                        self.primary()?
                    } else {
                        self.expect(Tok::LBrack, "'['")?;
                        let e = self.expr()?;
                        self.expect(Tok::RBrack, "']'")?;
                        e
                    };
                    Ok(match kw {
                        "EXISTS" => Expr::ExistsNum(v, Box::new(body)),
                        "FORALL" => Expr::ForallNum(v, Box::new(body)),
                        _ => Expr::ExistsStr(v, Box::new(body)),
                    })
                }
                _ => Err(self.error(EXPECTED)),
            },
            _ => Err(self.error(EXPECTED)),
        }
    }

    /// `pred, expr` or just `expr`.
    fn optional_pred_arg(&mut self) -> PResult<(Option<Pred>, Expr)> {
        let save = self.pos;
        let pred_err = match self.pred() {
            Ok(p) => {
                if self.eat(&Tok::Comma) {
                    return Ok((Some(p), self.expr()?));
                }
                self.error(&["','"])
            }
            Err(e) => e,
        };
        self.pos = save;
        match self.expr() {
            Ok(e) => Ok((None, e)),
            Err(expr_err) => Err(furthest(expr_err, pred_err)),
        }
    }

    fn count_cmp(&mut self) -> PResult<Expr> {
        let (lhs_coeff, lhs) = self.count_side()?;
        let rel = match self.peek() {
            Tok::Lt => Rel::Lt,
            Tok::Le => Rel::Le,
            Tok::Eq => Rel::Eq,
            Tok::Ge => Rel::Ge,
            Tok::Gt => Rel::Gt,
            _ => return Err(self.error(&["'<'", "'<='", "'='", "'>='", "'>'"])),
        };
        self.bump();
        let (rhs_coeff, rhs) = self.count_side()?;
        Ok(Expr::CountCmp { lhs_coeff, lhs: Box::new(lhs), rel, rhs_coeff, rhs: Box::new(rhs) })
    }

    fn count_side(&mut self) -> PResult<(u32, Expr)> {
        let mut coeff = 1;
        if let Tok::Int(n) = *self.peek() {
            coeff = u32::try_from(n).map_err(|_| {
                let mut e = self.error(&["coefficient"]);
                e.message = "coefficient too large".into();
                e
            })?;
            self.bump();
            self.expect(Tok::Star, "'*'")?;
        }
        self.expect_kw("COUNT")?;
        self.expect(Tok::LParen, "'('")?;
        let e = self.expr()?;
        self.expect(Tok::RParen, "')'")?;
        Ok((coeff, e))
    }

    fn pred(&mut self) -> PResult<Pred> {
        let mut lhs = self.pred_and()?;
        while self.eat(&Tok::Bar) {
            lhs = Pred::or(lhs, self.pred_and()?);
        }
        Ok(lhs)
    }

    fn pred_and(&mut self) -> PResult<Pred> {
        let mut lhs = self.pred_unary()?;
        while self.eat(&Tok::Amp) {
            lhs = Pred::and(lhs, self.pred_unary()?);
        }
        Ok(lhs)
    }

    fn pred_unary(&mut self) -> PResult<Pred> {
        let tok = self.peek().clone();
        let simple = |ctor: fn(LinTerm) -> Pred, p: &mut Parser| -> PResult<Pred> {
            p.bump();
            Ok(ctor(p.term()?))
        };
        match tok {
            Tok::Bang => {
                self.bump();
                Ok(Pred::not(self.pred_unary()?))
            }
            Tok::LParen => {
                self.bump();
                let p = self.pred()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(p)
            }
            Tok::Eq => simple(Pred::Eq, self),
            Tok::Ge => simple(Pred::Ge, self),
            Tok::Gt => simple(Pred::Gt, self),
            Tok::Le => simple(Pred::Le, self),
            Tok::Lt => simple(Pred::Lt, self),
            Tok::EqEq => {
                self.bump();
                let t = self.term()?;
                self.expect_kw("mod")?;
                match *self.peek() {
                    Tok::Int(m) => {
                        self.bump();
                        Ok(Pred::Mod(t, m as u64))
                    }
                    _ => Err(self.error(&["modulus"])),
                }
            }
            Tok::Kw("EVEN") => {
                self.bump();
                Ok(Pred::Even)
            }
            Tok::Kw("ODD") => {
                self.bump();
                Ok(Pred::Odd)
            }
            _ => Err(self.error(&["predicate"])),
        }
    }

    /// A position index; a leading `=` is tolerated (`AT(=i, a)`).
    fn index_term(&mut self) -> PResult<LinTerm> {
        self.eat(&Tok::Eq);
        self.term()
    }

    fn term(&mut self) -> PResult<LinTerm> {
        let negate = self.eat(&Tok::Minus);
        let first = self.term_factor()?;
        let mut acc = if negate { first.scale(-1) } else { first };
        loop {
            if self.eat(&Tok::Plus) {
                acc = acc.plus(&self.term_factor()?);
            } else if self.eat(&Tok::Minus) {
                acc = acc.minus(&self.term_factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term_factor(&mut self) -> PResult<LinTerm> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if self.eat(&Tok::Star) {
                    let v = self.var_name()?;
                    Ok(LinTerm::scaled_var(v, n))
                } else {
                    Ok(LinTerm::constant(n))
                }
            }
            Tok::Word(v) => {
                self.bump();
                Ok(LinTerm::var(v))
            }
            _ => Err(self.error(&["integer", "variable"])),
        }
    }
}

/// Renders an expression in canonical ASCII form with minimal parentheses.
pub fn render(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

pub fn render_pred(p: &Pred) -> String {
    let mut out = String::new();
    write_pred(&mut out, p, 0);
    out
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Alph(..) => 0,
        Expr::Iff(..) => 1,
        Expr::Implies(..) => 2,
        Expr::Or(..) => 3,
        Expr::And(..) => 4,
        Expr::Concat(..) => 5,
        Expr::Not(..) => 6,
        _ => 7,
    }
}

fn is_plain_word(w: &str) -> bool {
    !w.is_empty() && w.chars().all(|c| c.is_ascii_alphabetic()) && !KEYWORDS.contains(&w)
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let wrap = precedence(e) < min;
    if wrap {
        out.push('(');
    }
    let fn_form = |out: &mut String, name: &str, p: &Option<Pred>, body: &Expr| {
        out.push_str(name);
        out.push('(');
        if let Some(p) = p {
            write_pred(out, p, 0);
            out.push_str(", ");
        }
        write_expr(out, body, 0);
        out.push(')');
    };
    match e {
        Expr::Atom(w) if w.is_empty() => out.push_str("eps"),
        Expr::Atom(w) if is_plain_word(w) => out.push_str(w),
        Expr::Atom(w) => {
            out.push('\'');
            out.push_str(w);
            out.push('\'');
        }
        Expr::Top => out.push_str("TOP"),
        Expr::Bot => out.push_str("BOT"),
        Expr::Not(a) => {
            out.push('!');
            write_expr(out, a, 6);
        }
        Expr::And(a, b) => binary(out, a, " & ", b, 4, 5),
        Expr::Or(a, b) => binary(out, a, " | ", b, 3, 4),
        Expr::Implies(a, b) => binary(out, a, " -> ", b, 3, 2),
        Expr::Iff(a, b) => binary(out, a, " <-> ", b, 1, 2),
        Expr::Concat(a, b) => binary(out, a, " . ", b, 5, 6),
        Expr::Rep(p, a) => fn_form(out, "REP", p, a),
        Expr::Has(p, a) => fn_form(out, "HAS", p, a),
        Expr::Begin(p, a) => fn_form(out, "BEGIN", p, a),
        Expr::End(p, a) => fn_form(out, "END", p, a),
        Expr::Len(p) => {
            out.push_str("LEN ");
            write_pred(out, p, 3);
        }
        Expr::Alph(syms, a) => {
            out.push_str("ALPH(");
            let list: Vec<String> = syms.iter().map(|c| c.to_string()).collect();
            out.push_str(&list.join(","));
            out.push_str("): ");
            write_expr(out, a, 0);
        }
        Expr::Alternate(a, b) => {
            out.push_str("ALTERNATE(");
            write_expr(out, a, 0);
            out.push_str(", ");
            write_expr(out, b, 0);
            out.push(')');
        }
        Expr::Cons(items) => {
            out.push_str("CONS(");
            for (k, (p, x)) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str("; ");
                }
                write_pred(out, p, 0);
                out.push_str(", ");
                write_expr(out, x, 0);
            }
            out.push(')');
        }
        Expr::Range(i, j, a) => {
            out.push_str(&format!("RANGE({i}, {j}, "));
            write_expr(out, a, 0);
            out.push(')');
        }
        Expr::At(i, a) => {
            out.push_str(&format!("AT({i}, "));
            write_expr(out, a, 0);
            out.push(')');
        }
        Expr::CountCmp { lhs_coeff, lhs, rel, rhs_coeff, rhs } => {
            let side = |out: &mut String, c: u32, x: &Expr| {
                if c != 1 {
                    out.push_str(&format!("{c}*"));
                }
                out.push_str("COUNT(");
                write_expr(out, x, 0);
                out.push(')');
            };
            side(out, *lhs_coeff, lhs);
            out.push_str(&format!(" {} ", rel.symbol()));
            side(out, *rhs_coeff, rhs);
        }
        Expr::ExistsNum(v, a) => quantifier(out, "EXISTS", v, a),
        Expr::ForallNum(v, a) => quantifier(out, "FORALL", v, a),
        Expr::ExistsStr(v, a) => quantifier(out, "EXISTSSTR", v, a),
        Expr::StrVar(v) => {
            out.push('$');
            out.push_str(v);
        }
        Expr::Reverse(a) => {
            out.push_str("REVERSE(");
            write_expr(out, a, 0);
            out.push(')');
        }
        Expr::Palindrome => out.push_str("PALINDROME"),
    }
    if wrap {
        out.push(')');
    }
}

fn binary(out: &mut String, a: &Expr, op: &str, b: &Expr, lmin: u8, rmin: u8) {
    write_expr(out, a, lmin);
    out.push_str(op);
    write_expr(out, b, rmin);
}

fn quantifier(out: &mut String, kw: &str, v: &str, body: &Expr) {
    out.push_str(kw);
    out.push(' ');
    out.push_str(v);
    out.push_str(" [ ");
    write_expr(out, body, 0);
    out.push_str(" ]");
}

fn pred_precedence(p: &Pred) -> u8 {
    match p {
        Pred::Or(..) => 1,
        Pred::And(..) => 2,
        _ => 3,
    }
}

fn write_pred(out: &mut String, p: &Pred, min: u8) {
    let wrap = pred_precedence(p) < min;
    if wrap {
        out.push('(');
    }
    match p {
        Pred::Eq(t) => out.push_str(&format!("={t}")),
        Pred::Ge(t) => out.push_str(&format!(">={t}")),
        Pred::Gt(t) => out.push_str(&format!(">{t}")),
        Pred::Le(t) => out.push_str(&format!("<={t}")),
        Pred::Lt(t) => out.push_str(&format!("<{t}")),
        Pred::Mod(t, m) => out.push_str(&format!("== {t} mod {m}")),
        Pred::Even => out.push_str("EVEN"),
        Pred::Odd => out.push_str("ODD"),
        Pred::Not(a) => {
            out.push('!');
            write_pred(out, a, 3);
        }
        Pred::And(a, b) => {
            write_pred(out, a, 2);
            out.push_str(" & ");
            write_pred(out, b, 3);
        }
        Pred::Or(a, b) => {
            write_pred(out, a, 1);
            out.push_str(" | ");
            write_pred(out, b, 2);
        }
    }
    if wrap {
        out.push(')');
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_pred(self))
    }
}
