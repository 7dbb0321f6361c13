//! Expression parser for germ input.
//!
//! Grammar (explicit `*`, integer exponents, unary minus at expression head):
//!
//! ```text
//! expr   := ['-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' nat)?
//! base   := 'x' | 'y' | 'i' | ident | number | '(' expr ')'
//! number := integer | integer '/' integer
//! ```
//!
//! Identifiers other than `x`, `y`, `i` are parameters and must be bound.

use super::BivarPoly;
use crate::error::{Error, Result};
use crate::ratio::Q;
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    X,
    Y,
    I,
    Ident(String),
    Number { value: Q, integral: bool },
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src: src.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        while let Some((pos, tok)) = lx.next_token()? {
            out.push((pos, tok));
        }
        Ok(out)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Tok)>> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let ch = self.src[self.pos];
        let tok = match ch {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                let num = self.read_digits();
                // A fraction is one token: integer '/' integer, no spaces.
                if self.pos < self.src.len() && self.src[self.pos] == b'/' {
                    let slash = self.pos;
                    self.pos += 1;
                    if self.pos >= self.src.len() || !self.src[self.pos].is_ascii_digit() {
                        return Err(Error::Syntax {
                            pos: slash,
                            msg: "expected denominator digits after '/'".into(),
                        });
                    }
                    let den = self.read_digits();
                    if den.is_zero() {
                        return Err(Error::Syntax {
                            pos: slash + 1,
                            msg: "zero denominator".into(),
                        });
                    }
                    Tok::Number { value: Q::new(num, den), integral: false }
                } else {
                    Tok::Number { value: Q::from_integer(num), integral: true }
                }
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos + 1;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let word = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                match word {
                    "x" => Tok::X,
                    "y" => Tok::Y,
                    "i" => Tok::I,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{}`", other as char),
                })
            }
        };
        Ok(Some((start, tok)))
    }

    fn read_digits(&mut self) -> BigInt {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap()
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    cursor: usize,
    params: &'a BTreeMap<String, Scalar>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.cursor)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.cursor).cloned();
        self.cursor += 1;
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn expr(&mut self) -> Result<BivarPoly> {
        let mut negate = false;
        if matches!(self.peek(), Some((_, Tok::Minus))) {
            self.bump();
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some((_, Tok::Plus)) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.add(&rhs);
                }
                Some((_, Tok::Minus)) => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = acc.sub(&rhs);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<BivarPoly> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some((_, Tok::Star))) {
            self.bump();
            let rhs = self.factor()?;
            acc = acc.mul(&rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<BivarPoly> {
        let base = self.base()?;
        if matches!(self.peek(), Some((_, Tok::Caret))) {
            self.bump();
            let pos = self.here();
            match self.bump() {
                Some((_, Tok::Number { value, integral })) => {
                    if !integral {
                        return Err(Error::NonIntegerExponent { pos });
                    }
                    let n = value
                        .to_integer()
                        .to_u32()
                        .ok_or(Error::NonIntegerExponent { pos })?;
                    return Ok(base.pow(n));
                }
                Some((_, Tok::Minus)) => return Err(Error::NonIntegerExponent { pos }),
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        msg: "expected integer exponent after '^'".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<BivarPoly> {
        let pos = self.here();
        match self.bump() {
            Some((_, Tok::X)) => Ok(BivarPoly::var_x()),
            Some((_, Tok::Y)) => Ok(BivarPoly::var_y()),
            Some((_, Tok::I)) => Ok(BivarPoly::constant(Scalar::i())),
            Some((_, Tok::Number { value, .. })) => Ok(BivarPoly::constant(Scalar::from_q(value))),
            Some((_, Tok::Ident(name))) => match self.params.get(&name) {
                Some(v) => Ok(BivarPoly::constant(v.clone())),
                None => Err(Error::UnboundParameter(name)),
            },
            Some((_, Tok::LParen)) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    other => Err(Error::Syntax {
                        pos: other.map(|(p, _)| p).unwrap_or(self.end),
                        msg: "expected ')'".into(),
                    }),
                }
            }
            _ => Err(Error::Syntax {
                pos,
                msg: "expected 'x', 'y', 'i', a number, a parameter, or '('".into(),
            }),
        }
    }
}

/// Parse an expression with all parameters substituted.
pub fn parse_poly(text: &str, params: &BTreeMap<String, Scalar>) -> Result<BivarPoly> {
    let toks = Lexer::tokens(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax { pos: 0, msg: "empty expression".into() });
    }
    let mut parser = Parser { toks, cursor: 0, params, end: text.len() };
    let poly = parser.expr()?;
    if let Some((pos, _)) = parser.peek() {
        return Err(Error::Syntax { pos: *pos, msg: "trailing input".into() });
    }
    Ok(poly)
}

/// Parse a constant expression (used for `--param` values).
pub fn parse_scalar_expr(text: &str) -> Result<Scalar> {
    let poly = parse_poly(text, &BTreeMap::new())?;
    if poly.is_zero() {
        return Ok(Scalar::zero());
    }
    if poly.total_degree() != Some(0) {
        return Err(Error::Syntax {
            pos: 0,
            msg: "expected a constant expression".into(),
        });
    }
    Ok(poly.coeff(0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q;

    fn params(pairs: &[(&str, i64)]) -> BTreeMap<String, Scalar> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), Scalar::from_int(*v)))
            .collect()
    }

    #[test]
    fn example_family_with_parameter() {
        let f = parse_poly("x^3 - 3*t^2*x*y^10 + y^12", &params(&[("t", 1)])).unwrap();
        assert_eq!(f.to_string(), "x^3 - 3*x*y^10 + y^12");
        assert!(f.coeff(1, 10).eq_exact(&Scalar::from_int(-3)));
    }

    #[test]
    fn cancellation_yields_zero() {
        let f = parse_poly("0*x + y - y", &Default::default()).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn two_parameter_family() {
        let f = parse_poly(
            "x^3 + b*x^2*y^3 + y^9 + c*x*y^7",
            &params(&[("b", 1), ("c", 1)]),
        )
        .unwrap();
        assert_eq!(f.to_string(), "x^3 + x^2*y^3 + x*y^7 + y^9");
    }

    #[test]
    fn unbound_parameter_is_reported() {
        let err = parse_poly("x + t*y", &Default::default()).unwrap_err();
        assert_eq!(err, Error::UnboundParameter("t".into()));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_poly("x^3 + $", &Default::default()).unwrap_err();
        match err {
            Error::Syntax { pos, .. } => assert_eq!(pos, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fractional_exponent_rejected() {
        let err = parse_poly("x^1/2", &Default::default()).unwrap_err();
        assert!(matches!(err, Error::NonIntegerExponent { .. }));
        let err = parse_poly("x^-2", &Default::default()).unwrap_err();
        assert!(matches!(err, Error::NonIntegerExponent { .. }));
    }

    #[test]
    fn rational_coefficients_and_unary_minus() {
        let f = parse_poly("-2/3*x + (1/2 + i)*y", &Default::default()).unwrap();
        assert!(f.coeff(1, 0).eq_exact(&Scalar::from_q(q(-2, 3))));
        assert!(f.coeff(0, 1).eq_exact(&Scalar::Exact(q(1, 2), q(1, 1))));
    }

    #[test]
    fn scalar_expression_values() {
        assert!(parse_scalar_expr("3/4").unwrap().eq_exact(&Scalar::from_q(q(3, 4))));
        assert!(parse_scalar_expr("-2").unwrap().eq_exact(&Scalar::from_int(-2)));
        assert!(parse_scalar_expr("1/2 - 3*i")
            .unwrap()
            .eq_exact(&Scalar::Exact(q(1, 2), q(-3, 1))));
        assert!(parse_scalar_expr("x + 1").is_err());
    }
}
