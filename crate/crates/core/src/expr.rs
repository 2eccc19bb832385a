//! Rational expressions over named symbols, such as `(1-e)G + (2n+2)F`.
//!
//! Juxtaposition is multiplication, so `2G` and `(2+e)F` parse as products.
//! Printing uses an explicit `*` and the fewest parentheses that reparse to
//! the same tree.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::rational::Q;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("column {col}: {msg}")]
    Syntax { col: usize, msg: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a non-constant expression")]
    NonConstantDivisor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(BigInt),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num(n: i64) -> Self {
        Expr::Num(BigInt::from(n))
    }

    pub fn sym(s: impl Into<String>) -> Self {
        Expr::Sym(s.into())
    }

    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, len: src.len() };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some((col, t)) => Err(ExprError::Syntax {
                col: col + 1,
                msg: format!("unexpected {}", t.describe()),
            }),
        }
    }

    /// Every symbol mentioned, in first-occurrence order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
            Expr::Neg(a) => a.collect_symbols(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    /// Evaluates to a rational, resolving each symbol through `lookup`.
    pub fn eval(&self, lookup: &dyn Fn(&str) -> Option<Q>) -> Result<Q, ExprError> {
        Ok(match self {
            Expr::Num(n) => Q::from_integer(n.clone()),
            Expr::Sym(s) => lookup(s).ok_or_else(|| ExprError::UnknownSymbol(s.clone()))?,
            Expr::Neg(a) => -a.eval(lookup)?,
            Expr::Add(a, b) => a.eval(lookup)? + b.eval(lookup)?,
            Expr::Sub(a, b) => a.eval(lookup)? - b.eval(lookup)?,
            Expr::Mul(a, b) => a.eval(lookup)? * b.eval(lookup)?,
            Expr::Div(a, b) => {
                let d = b.eval(lookup)?;
                if d.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                a.eval(lookup)? / d
            }
        })
    }

    /// Expands into a polynomial, resolving each symbol through `lookup`.
    pub fn to_poly(&self, lookup: &dyn Fn(&str) -> Option<Poly>) -> Result<Poly, ExprError> {
        Ok(match self {
            Expr::Num(n) => Poly::constant(Q::from_integer(n.clone())),
            Expr::Sym(s) => lookup(s).ok_or_else(|| ExprError::UnknownSymbol(s.clone()))?,
            Expr::Neg(a) => a.to_poly(lookup)?.scale(&Q::from_integer(BigInt::from(-1))),
            Expr::Add(a, b) => a.to_poly(lookup)?.add(&b.to_poly(lookup)?),
            Expr::Sub(a, b) => a.to_poly(lookup)?.sub(&b.to_poly(lookup)?),
            Expr::Mul(a, b) => a.to_poly(lookup)?.mul(&b.to_poly(lookup)?),
            Expr::Div(a, b) => {
                let d = b
                    .to_poly(lookup)?
                    .as_constant()
                    .ok_or(ExprError::NonConstantDivisor)?;
                if d.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                a.to_poly(lookup)?.scale(&(Q::from_integer(BigInt::from(1)) / d))
            }
        })
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(_) | Expr::Sym(_) => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        let paren = self.level() < min_level;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Num(n) => write!(f, "{n}")?,
            Expr::Sym(s) => f.write_str(s)?,
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)?;
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)?;
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                b.write_at(f, 3)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Num(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(n) => format!("number `{n}`"),
            Token::Ident(s) => format!("name `{s}`"),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self, Token::Num(_) | Token::Ident(_) | Token::LParen)
    }
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (col, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Token::Plus),
            '-' => Some(Token::Minus),
            '*' => Some(Token::Star),
            '/' => Some(Token::Slash),
            '(' => Some(Token::LParen),
            ')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((col, t));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((col, Token::Num(s.parse().expect("digits"))));
        } else if is_ident_start(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i].1) {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|(_, c)| c).collect();
            out.push((col, Token::Ident(s)));
        } else {
            return Err(ExprError::Syntax {
                col: col + 1,
                msg: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Token)> {
        self.tokens.get(self.pos)
    }

    fn peek_token(&self) -> Option<&Token> {
        self.peek().map(|(_, t)| t)
    }

    fn error_here(&self, expected: &str) -> ExprError {
        match self.peek() {
            Some((col, t)) => ExprError::Syntax {
                col: col + 1,
                msg: format!("expected {expected}, found {}", t.describe()),
            },
            None => ExprError::Syntax {
                col: self.len + 1,
                msg: format!("expected {expected}, found end of input"),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek_token() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek_token() {
                Some(Token::Star) => {
                    self.pos += 1;
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    acc = Expr::Div(Box::new(acc), Box::new(self.factor()?));
                }
                Some(t) if t.starts_factor() => {
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek_token().cloned() {
            Some(Token::Minus) => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Token::Ident(s)) => {
                self.pos += 1;
                Ok(Expr::Sym(s))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek_token() {
                    Some(Token::RParen) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(self.error_here("`)`")),
                }
            }
            _ => Err(self.error_here("a number, a name, `-` or `(`")),
        }
    }
}

/// A polynomial with rational coefficients. Monomials are sorted lists of
/// symbol names; the empty monomial is the constant term.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Vec<String>, Q>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn symbol(s: impl Into<String>) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![s.into()], Q::from_integer(BigInt::from(1)));
        p
    }

    fn add_term(&mut self, mut mono: Vec<String>, c: Q) {
        mono.sort();
        let entry = self.terms.entry(mono).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<String>, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Q::from_integer(BigInt::from(-1))))
    }

    pub fn scale(&self, k: &Q) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mono: Vec<String> = m1.iter().chain(m2.iter()).cloned().collect();
                out.add_term(mono, c1 * c2);
            }
        }
        out
    }
}
