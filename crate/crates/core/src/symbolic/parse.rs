//! Text grammar for coefficient functions.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("-" | "+") unary | power ;
//! power    = atom [ "^" exponent ] ;
//! exponent = [ "-" | "+" ] integer | "(" [ "-" | "+" ] integer ")" ;
//! atom     = number | "x" | name | "exp" "(" expr ")" | "(" expr ")" ;
//! number   = digits [ "." digits ] [ ("e" | "E") [ "-" | "+" ] digits ]
//!          | "." digits [ ("e" | "E") [ "-" | "+" ] digits ] ;
//! name     = letter { letter | digit | "_" } ;
//! ```
//!
//! Decimal literals are read as exact rationals. `^` binds tighter than unary
//! minus, so `-x^2` is `-(x^2)`. A `name` other than `x` and `exp` must be
//! bound in the parameter table passed to [`parse_with`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::expr::Expression;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected '{0}'")]
    Expected(char),
    #[error("exponent must be an integer")]
    NonIntegerExponent,
    #[error("exponent out of range")]
    ExponentOverflow,
    #[error("malformed number")]
    BadNumber,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("trailing input")]
    Trailing,
}

/// Parse failure; `position` is a 0-based byte offset into the input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at position {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

pub fn parse(text: &str) -> Result<Expression, ParseError> {
    parse_with(text, &BTreeMap::new())
}

/// Parse with named constants substituted at parse time.
pub fn parse_with(
    text: &str,
    params: &BTreeMap<String, BigRational>,
) -> Result<Expression, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        params,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err(ParseErrorKind::Trailing));
    }
    Ok(e)
}

/// Exact value of a decimal literal such as `0.25`, `3e-2` or `-1.5`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        let r = BigRational::new(n, d);
        return Some(if neg { -r } else { r });
    }
    let mut p = Parser {
        src: body.as_bytes(),
        pos: 0,
        params: &BTreeMap::new(),
    };
    let r = p.number().ok()?;
    (p.pos == body.len()).then_some(if neg { -r } else { r })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    params: &'a BTreeMap<String, BigRational>,
}

impl Parser<'_> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.src.get(self.pos) {
            Some(&c) => self.err(ParseErrorKind::UnexpectedChar(c as char)),
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(ParseErrorKind::Expected(c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = lhs.add(&self.term()?);
            } else if self.eat(b'-') {
                lhs = lhs.sub(&self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = lhs.mul(&self.unary()?);
            } else if self.eat(b'/') {
                lhs = lhs.div(&self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let n = self.exponent()?;
        if self.peek() == Some(b'^') {
            return Err(self.unexpected());
        }
        Ok(base.powi(n))
    }

    fn exponent(&mut self) -> Result<i32, ParseError> {
        let start = {
            self.skip_ws();
            self.pos
        };
        let paren = self.eat(b'(');
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let non_integer = ParseError {
            position: start,
            kind: ParseErrorKind::NonIntegerExponent,
        };
        if self.pos == digits_start {
            return Err(non_integer);
        }
        if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
            return Err(non_integer);
        }
        let text = std::str::from_utf8(&self.src[digits_start..self.pos]).unwrap();
        let v: i64 = text.parse().map_err(|_| ParseError {
            position: digits_start,
            kind: ParseErrorKind::ExponentOverflow,
        })?;
        let v = if neg { -v } else { v };
        if paren && !self.eat(b')') {
            return Err(non_integer);
        }
        i32::try_from(v).map_err(|_| ParseError {
            position: digits_start,
            kind: ParseErrorKind::ExponentOverflow,
        })
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expression::rational(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "x" => Ok(Expression::x()),
                    "exp" => {
                        self.expect(b'(')?;
                        let e = self.expr()?;
                        self.expect(b')')?;
                        Ok(e.exp())
                    }
                    _ => match self.params.get(name) {
                        Some(v) => Ok(Expression::rational(v.clone())),
                        None => Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                        }),
                    },
                }
            }
            _ => Err(self.unexpected()),
        }
    }

    fn number(&mut self) -> Result<BigRational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let mut mantissa = String::new();
        let mut frac_digits: i64 = 0;
        while self.pos < s.len() && s[self.pos].is_ascii_digit() {
            mantissa.push(s[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                mantissa.push(s[self.pos] as char);
                frac_digits += 1;
                self.pos += 1;
            }
        }
        if mantissa.is_empty() {
            return Err(ParseError {
                position: start,
                kind: ParseErrorKind::BadNumber,
            });
        }
        let mut exp10: i64 = 0;
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            // Only an exponent if digits follow; otherwise leave the `e` for the caller.
            let save = self.pos;
            self.pos += 1;
            let neg = match s.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let ds = self.pos;
            while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == ds {
                self.pos = save;
            } else {
                let v: i64 = std::str::from_utf8(&s[ds..self.pos])
                    .unwrap()
                    .parse()
                    .ok()
                    .filter(|v: &i64| *v <= 4096)
                    .ok_or(ParseError {
                        position: ds,
                        kind: ParseErrorKind::BadNumber,
                    })?;
                exp10 = if neg { -v } else { v };
            }
        }
        let m: BigInt = mantissa.parse().unwrap();
        let e = exp10 - frac_digits;
        let ten = BigInt::from(10);
        let scale = ten.pow(e.unsigned_abs() as u32);
        Ok(if e >= 0 {
            BigRational::from_integer(m * scale)
        } else {
            BigRational::new(m, scale)
        })
    }
}
