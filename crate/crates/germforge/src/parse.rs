//! Tokens and term grammar shared by every text format.

use std::fmt;

use germforge_core::GaussRat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

pub type ParseResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    Float(FloatBits),
}

/// An `f64` compared by bit pattern so tokens stay `Eq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatBits(pub u64);

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(text: &str) -> ParseResult<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut float = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                float = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '-' || chars[j] == '+') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    float = true;
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if float {
                let v: f64 = s
                    .parse()
                    .map_err(|_| ParseError::new(pos, format!("bad number '{s}'")))?;
                Tok::Float(FloatBits(v.to_bits()))
            } else {
                Tok::Num(s.parse().expect("digits"))
            };
            out.push(Token { tok, pos });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), pos });
            continue;
        }
        if "+-*/^()=;:,<>".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError::new(pos, format!("unexpected character '{c}'")));
    }
    Ok(out)
}

/// Variable naming in a term list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Vars {
    /// `z1..zn` and `zbar1..zbarn`.
    Mixed(usize),
    /// `z1..zn`.
    Holomorphic(usize),
    /// `t`.
    Curve,
}

/// One parsed term: exponents of `z`, of `zbar` (or of `t` in slot 0), and the coefficient.
#[derive(Clone, Debug)]
pub struct Term {
    pub z: Vec<u32>,
    pub zbar: Vec<u32>,
    pub coeff: GaussRat,
    pub pos: Pos,
}

pub struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: Pos,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Float(b) => format!("number {}", f64::from_bits(b.0)),
    }
}

impl Parser {
    pub fn new(text: &str) -> ParseResult<Self> {
        let toks = lex(text)?;
        let lines: Vec<&str> = text.split('\n').collect();
        let end = Pos {
            line: lines.len(),
            column: lines.last().map_or(0, |l| l.chars().count()) + 1,
        };
        Ok(Parser { toks, at: 0, end })
    }

    pub fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    pub fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    pub fn error<T>(&self, message: impl Into<String>) -> ParseResult<T> {
        Err(ParseError::new(self.pos(), message))
    }

    fn unexpected<T>(&self, wanted: &str) -> ParseResult<T> {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", describe(t))),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub fn is_sym(&self, c: char) -> bool {
        self.peek() == Some(&Tok::Sym(c))
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_sym(&mut self, c: char) -> ParseResult<()> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.unexpected(&format!("'{c}'"))
        }
    }

    pub fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(x)) if x == s)
    }

    pub fn eat_ident(&mut self, s: &str) -> bool {
        if self.is_ident(s) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_ident(&mut self, s: &str) -> ParseResult<()> {
        if self.eat_ident(s) {
            Ok(())
        } else {
            self.unexpected(&format!("'{s}'"))
        }
    }

    pub fn ident(&mut self) -> ParseResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => self.unexpected("a name"),
        }
    }

    pub fn uint(&mut self) -> ParseResult<u32> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let v = u32::try_from(n.clone()).or_else(|_| self.error("integer out of range"))?;
                self.at += 1;
                Ok(v)
            }
            _ => self.unexpected("an integer"),
        }
    }

    pub fn float(&mut self) -> ParseResult<f64> {
        let neg = self.eat_sym('-');
        let v = match self.peek() {
            Some(Tok::Float(b)) => f64::from_bits(b.0),
            Some(Tok::Num(n)) => n.to_string().parse::<f64>().unwrap_or(f64::INFINITY),
            _ => return self.unexpected("a number"),
        };
        self.at += 1;
        Ok(if neg { -v } else { v })
    }

    /// `key = value ;`
    pub fn setting(&mut self, key: &str) -> ParseResult<u32> {
        self.expect_ident(key)?;
        self.expect_sym('=')?;
        let v = self.uint()?;
        self.expect_sym(';')?;
        Ok(v)
    }

    /// `a` or `a/b`.
    fn rational(&mut self) -> ParseResult<BigRational> {
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return self.unexpected("a number");
        };
        self.at += 1;
        if self.is_sym('/') {
            self.at += 1;
            let pos = self.pos();
            let Some(Tok::Num(d)) = self.peek().cloned() else {
                return self.unexpected("a denominator");
            };
            if d.is_zero() {
                return Err(ParseError::new(pos, "zero denominator"));
            }
            self.at += 1;
            return Ok(BigRational::new(n, d));
        }
        Ok(BigRational::from_integer(n))
    }

    /// A rational optionally followed by `i`, or `i` alone.
    fn gauss_part(&mut self) -> ParseResult<GaussRat> {
        if self.eat_ident("i") {
            return Ok(GaussRat::i());
        }
        let q = self.rational()?;
        if self.eat_ident("i") {
            Ok(GaussRat::new(BigRational::zero(), q))
        } else {
            Ok(GaussRat::real(q))
        }
    }

    fn starts_coeff(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Sym('('))) || self.is_ident("i")
    }

    /// `(a/b+c/d i)`, `a/b`, `c/d i`, or `i`; no leading sign.
    pub fn coefficient(&mut self) -> ParseResult<GaussRat> {
        if self.eat_sym('(') {
            let neg = self.eat_sym('-');
            let mut v = self.gauss_part()?;
            if neg {
                v = -v;
            }
            while self.is_sym('+') || self.is_sym('-') {
                let neg = self.eat_sym('-');
                if !neg {
                    self.at += 1;
                }
                let w = self.gauss_part()?;
                v = if neg { v - w } else { v + w };
            }
            self.expect_sym(')')?;
            return Ok(v);
        }
        self.gauss_part()
    }

    /// A coefficient with an optional leading sign.
    pub fn signed_coefficient(&mut self) -> ParseResult<GaussRat> {
        let neg = self.eat_sym('-');
        if !neg {
            self.eat_sym('+');
        }
        let c = self.coefficient()?;
        Ok(if neg { -c } else { c })
    }

    fn variable(&self, vars: Vars) -> Option<(bool, usize)> {
        let Some(Tok::Ident(s)) = self.peek() else {
            return None;
        };
        match vars {
            Vars::Curve => (s == "t").then_some((false, 0)),
            Vars::Mixed(n) | Vars::Holomorphic(n) => {
                let (bar, rest) = if let Some(r) = s.strip_prefix("zbar") {
                    (true, r)
                } else if let Some(r) = s.strip_prefix('z') {
                    (false, r)
                } else {
                    return None;
                };
                if bar && matches!(vars, Vars::Holomorphic(_)) {
                    return None;
                }
                let i: usize = rest.parse().ok()?;
                (i >= 1 && i <= n && !rest.starts_with('0')).then_some((bar, i - 1))
            }
        }
    }

    fn looks_like_variable(&self, vars: Vars) -> bool {
        let Some(Tok::Ident(s)) = self.peek() else {
            return false;
        };
        match vars {
            Vars::Curve => s == "t",
            _ => {
                let rest = s.strip_prefix('z').map(|r| r.strip_prefix("bar").unwrap_or(r));
                rest.is_some_and(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()))
            }
        }
    }

    fn nvars(vars: Vars) -> usize {
        match vars {
            Vars::Mixed(n) | Vars::Holomorphic(n) => n,
            Vars::Curve => 1,
        }
    }

    /// `c z1^2 zbar1` etc.; needs at least a coefficient or one factor.
    fn term(&mut self, vars: Vars, sign: bool) -> ParseResult<Term> {
        let pos = self.pos();
        let n = Parser::nvars(vars);
        let mut coeff = if self.starts_coeff() {
            self.coefficient()?
        } else {
            GaussRat::one()
        };
        let mut had_factor = false;
        let mut z = vec![0u32; n];
        let mut zbar = vec![0u32; n];
        loop {
            let star = self.is_sym('*');
            if star {
                self.at += 1;
            }
            if self.looks_like_variable(vars) {
                let Some((bar, i)) = self.variable(vars) else {
                    return self.unexpected("a variable of this file");
                };
                self.at += 1;
                let e = if self.eat_sym('^') {
                    let p = self.pos();
                    match self.peek() {
                        Some(Tok::Num(_)) => self.uint()?,
                        _ => return Err(ParseError::new(p, "malformed exponent")),
                    }
                } else {
                    1
                };
                if bar {
                    zbar[i] += e;
                } else {
                    z[i] += e;
                }
                had_factor = true;
            } else if star {
                if self.starts_coeff() {
                    coeff = coeff * self.coefficient()?;
                } else {
                    return self.unexpected("a factor after '*'");
                }
            } else {
                break;
            }
        }
        if !had_factor && pos == self.pos() {
            return self.unexpected("a term");
        }
        if !sign {
            coeff = -coeff;
        }
        Ok(Term { z, zbar, coeff, pos })
    }

    /// Signed terms up to the next token that cannot continue the sum.
    pub fn terms(&mut self, vars: Vars) -> ParseResult<Vec<Term>> {
        let mut out = Vec::new();
        let mut first = true;
        loop {
            let sign = if self.eat_sym('+') {
                true
            } else if self.eat_sym('-') {
                false
            } else if first && (self.starts_coeff() || self.looks_like_variable(vars)) {
                true
            } else {
                break;
            };
            first = false;
            out.push(self.term(vars, sign)?);
        }
        Ok(out)
    }
}
