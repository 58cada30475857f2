//! Recursive-descent parser for the polynomial and coefficient grammar.
//!
//! The grammar is LL(1) over the tokens INT, NAME, `+ - * / ^ ( )`:
//!
//! ```text
//! poly    := [sign] term { sign term }        sign := '+' | '-'
//! term    := factor { '*' factor }
//! factor  := INT [ '/' INT ]                  a rational constant
//!          | 'l'INT [ '^' INT ]               a generator l3, l5, ...
//!          | NAME [ '^' INT ]                 a basis variable
//!          | '(' poly ')'                     a parenthesized sum
//! ```
//!
//! Names of the form `l<digits>` are reserved for the formal generators and
//! may not be used as basis names. Output of the crate's `Display`/`render`
//! methods parses back through this grammar.

use num::BigInt;

use crate::error::{Error, Result};
use crate::ring::{Coefficient, Rational};
use crate::sym::Poly;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            at: self.pos,
            message: message.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(usize, Token)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let start = self.pos;
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((start, Token::Plus));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((start, Token::Minus));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((start, Token::Star));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((start, Token::Slash));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((start, Token::Caret));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((start, Token::LParen));
                    self.pos += 1;
                }
                b')' => {
                    out.push((start, Token::RParen));
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    let mut end = self.pos;
                    while end < self.src.len() && self.src[end].is_ascii_digit() {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    let value: BigInt = text.parse().map_err(|_| self.error("bad integer"))?;
                    out.push((start, Token::Int(value)));
                    self.pos = end;
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut end = self.pos;
                    while end < self.src.len()
                        && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    out.push((start, Token::Name(text.to_string())));
                    self.pos = end;
                }
                other => {
                    return Err(self.error(format!("unexpected character '{}'", other as char)))
                }
            }
        }
        Ok(out)
    }
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(_, t)| t)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).map(|(_, t)| t.clone());
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .or_else(|| self.tokens.last())
            .map(|(p, _)| *p)
            .unwrap_or(0)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            at: self.here(),
            message: message.into(),
        }
    }

    fn expect(&mut self, token: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == token => Ok(()),
            other => Err(self.error(format!("expected {token:?}, found {other:?}"))),
        }
    }

    fn dim(&self) -> usize {
        self.names.len()
    }

    fn poly(&mut self) -> Result<Poly> {
        let mut negate = false;
        match self.peek() {
            Some(Token::Minus) => {
                self.next();
                negate = true;
            }
            Some(Token::Plus) => {
                self.next();
            }
            _ => {}
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.add(&t)?;
                }
                Some(Token::Minus) => {
                    self.next();
                    let t = self.term()?;
                    acc = acc.sub(&t)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while self.peek() == Some(&Token::Star) {
            self.next();
            let f = self.factor()?;
            acc = acc.mul(&f)?;
        }
        Ok(acc)
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.next() {
            Some(Token::Int(n)) => u32::try_from(n.clone())
                .map_err(|_| self.error(format!("exponent {n} out of range"))),
            other => Err(self.error(format!("expected exponent, found {other:?}"))),
        }
    }

    fn factor(&mut self) -> Result<Poly> {
        match self.next() {
            Some(Token::Int(n)) => {
                let mut value = Rational::from(n);
                if self.peek() == Some(&Token::Slash) {
                    self.next();
                    match self.next() {
                        Some(Token::Int(d)) => {
                            if num::Zero::is_zero(&d) {
                                return Err(self.error("zero denominator"));
                            }
                            value /= Rational::from(d);
                        }
                        other => {
                            return Err(self.error(format!(
                                "expected denominator, found {other:?}"
                            )))
                        }
                    }
                }
                Ok(Poly::constant(
                    self.dim(),
                    Coefficient::from_rational(value),
                ))
            }
            Some(Token::LParen) => {
                let inner = self.poly()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Name(name)) => {
                let power = if self.peek() == Some(&Token::Caret) {
                    self.next();
                    self.exponent()?
                } else {
                    1
                };
                if let Some(i) = self.names.iter().position(|n| *n == name) {
                    let mut exps = vec![0u32; self.dim()];
                    exps[i] = power;
                    return Ok(Poly::monomial(self.dim(), &exps, Coefficient::one()));
                }
                if let Some(idx) = lambda_index(&name) {
                    let gen = Coefficient::lambda(idx)?;
                    let mut acc = Coefficient::one();
                    for _ in 0..power {
                        acc = acc.try_mul(&gen)?;
                    }
                    return Ok(Poly::constant(self.dim(), acc));
                }
                Err(self.error(format!("unknown name '{name}'")))
            }
            other => Err(self.error(format!("expected a factor, found {other:?}"))),
        }
    }
}

fn lambda_index(name: &str) -> Option<u32> {
    let digits = name.strip_prefix('l')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Parses a polynomial over the given basis names.
pub fn poly(src: &str, names: &[String]) -> Result<Poly> {
    for n in names {
        if lambda_index(n).is_some() {
            return Err(Error::InvalidAlgebra(format!(
                "basis name '{n}' collides with the reserved generator names l<k>"
            )));
        }
    }
    let tokens = Lexer::new(src).tokens()?;
    if tokens.is_empty() {
        return Err(Error::Parse {
            at: 0,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser {
        tokens,
        cursor: 0,
        names,
    };
    let result = parser.poly()?;
    if parser.cursor != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(result)
}

/// Parses a bare coefficient (a polynomial in no variables).
pub fn coefficient(src: &str) -> Result<Coefficient> {
    let p = poly(src, &[])?;
    let mut acc = Coefficient::zero();
    for (_, c) in p.terms() {
        acc = acc.add(c);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat;

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into(), "z".into()]
    }

    #[test]
    fn parses_plain_polys() {
        let p = poly("x*y + 1/2*z", &names()).unwrap();
        assert_eq!(p.render(&names()), "x*y + 1/2*z");
        let q = poly("-x^2 + 3*y*z - 2", &names()).unwrap();
        assert_eq!(q.render(&names()), "-x^2 + 3*y*z - 2");
    }

    #[test]
    fn parses_coefficients() {
        assert_eq!(
            coefficient("1/48").unwrap(),
            Coefficient::from_rational(rat(1, 48))
        );
        let c = coefficient("(-3/2)*l3*l5").unwrap();
        assert_eq!(c.to_string(), "(-3/2)*l3*l5");
        let c2 = coefficient("1 + 2*l3").unwrap();
        assert_eq!(c2.to_string(), "1 + 2*l3");
        assert_eq!(coefficient("l3^2").unwrap().to_string(), "l3^2");
    }

    #[test]
    fn lambda_terms_in_polys() {
        let p = poly("(1 + 2*l3)*x^2 + l5*y", &names()).unwrap();
        assert_eq!(p.render(&names()), "(1 + 2*l3)*x^2 + l5*y");
    }

    #[test]
    fn rejects_garbage() {
        assert!(poly("", &names()).is_err());
        assert!(poly("x +", &names()).is_err());
        assert!(poly("w", &names()).is_err());
        assert!(poly("x ^ -1", &names()).is_err());
        assert!(poly("1/0", &names()).is_err());
        assert!(poly("l4 * x", &names()).is_err()); // even zeta index
    }

    #[test]
    fn display_round_trip() {
        let p = poly("2*x^3 - 1/3*x*y^2 + (l3 + (-1/2)*l5)*z + 7", &names()).unwrap();
        let rendered = p.render(&names());
        let reparsed = poly(&rendered, &names()).unwrap();
        assert_eq!(p, reparsed);
    }
}
