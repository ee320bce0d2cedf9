use thiserror::Error;

use super::nfa::Nfa;
use crate::syntax::Alphabet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("regex error at byte {position}: {message}")]
pub struct RegexError {
    pub position: usize,
    pub message: String,
}

/// Parses textbook regular expressions: symbols, juxtaposition, `+` for
/// union, postfix `*`, parentheses, and `eps` (or `ε`) for the empty word.
/// `∅` denotes the empty language. Whitespace is ignored.
pub fn parse_regex(text: &str, sigma: &Alphabet) -> Result<Nfa, RegexError> {
    let toks = lex(text)?;
    let mut p = RegexParser { toks, pos: 0, sigma, end: text.len() };
    let n = p.union()?;
    if p.pos < p.toks.len() {
        return Err(p.error("unexpected token"));
    }
    Ok(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok {
    Sym(u8),
    Eps,
    Empty,
    Plus,
    Star,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, RegexError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some((i, c)) = it.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '+' | '|' => Tok::Plus,
            '*' => Tok::Star,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            'ε' => Tok::Eps,
            '∅' => Tok::Empty,
            'e' if text[i..].starts_with("eps") => {
                it.next();
                it.next();
                Tok::Eps
            }
            c if c.is_ascii_alphabetic() => Tok::Sym(c as u8),
            other => return Err(RegexError { position: i, message: format!("unexpected character {other:?}") }),
        };
        out.push((tok, i));
    }
    Ok(out)
}

struct RegexParser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sigma: &'a Alphabet,
    end: usize,
}

impl RegexParser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.0)
    }

    fn error(&self, message: &str) -> RegexError {
        let position = self.toks.get(self.pos).map_or(self.end, |t| t.1);
        RegexError { position, message: message.to_string() }
    }

    fn union(&mut self) -> Result<Nfa, RegexError> {
        let mut n = self.concat()?;
        while self.peek() == Some(Tok::Plus) {
            self.pos += 1;
            n = n.union(&self.concat()?);
        }
        Ok(n)
    }

    fn concat(&mut self) -> Result<Nfa, RegexError> {
        let mut n = self.star()?;
        while matches!(self.peek(), Some(Tok::Sym(_) | Tok::Eps | Tok::Empty | Tok::LParen)) {
            n = n.concat(&self.star()?);
        }
        Ok(n)
    }

    fn star(&mut self) -> Result<Nfa, RegexError> {
        let mut n = self.atom()?;
        while self.peek() == Some(Tok::Star) {
            self.pos += 1;
            n = n.star();
        }
        Ok(n)
    }

    fn atom(&mut self) -> Result<Nfa, RegexError> {
        let tok = self.peek().ok_or_else(|| self.error("unexpected end of regex"))?;
        let n = match tok {
            Tok::Sym(c) => {
                let s = self
                    .sigma
                    .index_of(c)
                    .ok_or_else(|| self.error(&format!("symbol {} is not in the alphabet", c as char)))?;
                Nfa::word(self.sigma, &[s])
            }
            Tok::Eps => Nfa::word(self.sigma, &[]),
            Tok::Empty => {
                let mut n = Nfa::new(self.sigma.clone());
                let q = n.add_state(false);
                n.add_initial(q);
                n
            }
            Tok::LParen => {
                self.pos += 1;
                let n = self.union()?;
                if self.peek() != Some(Tok::RParen) {
                    return Err(self.error("expected ')'"));
                }
                n
            }
            Tok::Plus | Tok::Star | Tok::RParen => return Err(self.error("expected a symbol, 'eps' or '('")),
        };
        self.pos += 1;
        Ok(n)
    }
}
