//! Precedence-climbing parser for germ expressions.
//!
//! Grammar: integers, `p/q`, `i`, `x`, `y`, binary `+ - * / ^`, unary minus and
//! parentheses. Division is only by nonzero constants; exponents are nonnegative
//! integer constants. Juxtaposition is rejected.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{Field, Gaussian, Rational};
use crate::poly::{check_degree, Bivariate, DEFAULT_DEGREE_CAP};
use crate::error::{GermError, Result};

type P = Bivariate<Gaussian>;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("syntax error at position {pos}: {message}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub pos: usize,
    pub message: String,
}

/// Parsed input with the top-level product structure when present.
#[derive(Clone, Debug, PartialEq)]
pub struct GermExpression {
    pub source: String,
    pub poly: P,
    /// Factors `(base, exponent)` when the expression is a top-level product.
    pub factors: Option<Vec<(P, u32)>>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    I,
    X,
    Y,
    Op(char),
    LParen,
    RParen,
}

fn lex(s: &str) -> std::result::Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut k = 0;
    while k < b.len() {
        let c = b[k] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => k += 1,
            '0'..='9' => {
                let st = k;
                while k < b.len() && b[k].is_ascii_digit() {
                    k += 1;
                }
                out.push((st, Tok::Num(s[st..k].parse().unwrap())));
            }
            'i' => {
                out.push((k, Tok::I));
                k += 1;
            }
            'x' => {
                out.push((k, Tok::X));
                k += 1;
            }
            'y' => {
                out.push((k, Tok::Y));
                k += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push((k, Tok::Op(c)));
                k += 1;
            }
            '(' => {
                out.push((k, Tok::LParen));
                k += 1;
            }
            ')' => {
                out.push((k, Tok::RParen));
                k += 1;
            }
            _ => {
                let ch = s[k..].chars().next().unwrap();
                return Err(ParseError { pos: k, message: format!("unexpected character '{ch}'") });
            }
        }
    }
    Ok(out)
}

/// Expression node value with its top-level product factors.
struct Val {
    poly: P,
    factors: Vec<(P, u32)>,
}

impl Val {
    fn atom(p: P) -> Self {
        Val { factors: vec![(p.clone(), 1)], poly: p }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    k: usize,
    end: usize,
    cap: u32,
    _src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.k).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.k).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> std::result::Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), message: msg.into() })
    }

    fn binding(op: char) -> (u8, bool) {
        match op {
            '+' | '-' => (1, false),
            '*' | '/' => (2, false),
            '^' => (4, true),
            _ => unreachable!(),
        }
    }

    fn expr(&mut self, min_prec: u8) -> std::result::Result<Val, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op(c)) => *c,
                Some(Tok::RParen) | None => break,
                Some(_) => return self.err("expected an operator (implicit multiplication is not allowed)"),
            };
            let (prec, right) = Self::binding(op);
            if prec < min_prec {
                break;
            }
            let op_pos = self.pos();
            self.k += 1;
            let next = if right { prec } else { prec + 1 };
            if op == '^' {
                let e_pos = self.pos();
                let e = self.expr(next)?;
                let n = exponent_value(&e.poly).ok_or(ParseError {
                    pos: e_pos,
                    message: "exponent must be a nonnegative integer constant".into(),
                })?;
                lhs = self.power(lhs, n, op_pos)?;
                continue;
            }
            let rhs = self.expr(next)?;
            lhs = match op {
                '+' => Val::atom(lhs.poly + rhs.poly),
                '-' => Val::atom(lhs.poly - rhs.poly),
                '*' => {
                    let poly = lhs.poly * rhs.poly;
                    self.check(&poly, op_pos)?;
                    let mut factors = lhs.factors;
                    factors.extend(rhs.factors);
                    Val { poly, factors }
                }
                '/' => {
                    if rhs.poly.total_degree() > 0 || rhs.poly.is_zero() {
                        return Err(ParseError {
                            pos: op_pos,
                            message: "division only by nonzero constants".into(),
                        });
                    }
                    let inv = rhs.poly.constant_term().inv();
                    let poly = lhs.poly.scale(&inv);
                    let mut factors = lhs.factors;
                    factors.push((P::constant(inv), 1));
                    Val { poly, factors }
                }
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn power(&self, base: Val, n: u32, pos: usize) -> std::result::Result<Val, ParseError> {
        if (base.poly.total_degree() as u64) * (n as u64) > self.cap as u64 {
            return Err(ParseError {
                pos,
                message: format!("total degree exceeds the cap {}", self.cap),
            });
        }
        let poly = base.poly.pow(n);
        let factors = base.factors.into_iter().map(|(p, e)| (p, e * n)).collect();
        Ok(Val { poly, factors })
    }

    fn check(&self, p: &P, pos: usize) -> std::result::Result<(), ParseError> {
        check_degree(p, self.cap).map_err(|_| ParseError {
            pos,
            message: format!("total degree exceeds the cap {}", self.cap),
        })
    }

    fn unary(&mut self) -> std::result::Result<Val, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.k += 1;
                // unary minus binds looser than ^ and tighter than *
                let v = self.expr(3)?;
                let mut factors = v.factors;
                factors.push((P::constant(-Gaussian::one()), 1));
                Ok(Val { poly: -v.poly, factors })
            }
            Some(Tok::Op('+')) => {
                self.k += 1;
                self.expr(3)
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> std::result::Result<Val, ParseError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.err("unexpected end of input"),
        };
        self.k += 1;
        let p = match tok {
            Tok::Num(n) => P::constant(Gaussian::real(Rational::from_integer(n))),
            Tok::I => P::constant(Gaussian::i()),
            Tok::X => P::x(),
            Tok::Y => P::y(),
            Tok::LParen => {
                let v = self.expr(0)?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.k += 1;
                // a parenthesized sum is a single factor
                return Ok(if v.factors.len() == 1 && v.factors[0].1 == 1 { Val::atom(v.poly) } else { v });
            }
            Tok::RParen => {
                self.k -= 1;
                return self.err("unexpected ')'");
            }
            Tok::Op(c) => {
                self.k -= 1;
                return self.err(format!("unexpected operator '{c}'"));
            }
        };
        Ok(Val::atom(p))
    }
}

fn exponent_value(p: &P) -> Option<u32> {
    if p.is_zero() {
        return Some(0);
    }
    if p.total_degree() != 0 {
        return None;
    }
    let c = p.constant_term();
    if !c.im.is_zero() || !c.re.is_integer() {
        return None;
    }
    c.re.to_integer().to_u32()
}

/// Parses with the default degree cap.
pub fn parse_poly(text: &str) -> Result<P> {
    Ok(parse_expression(text, DEFAULT_DEGREE_CAP)?.poly)
}

/// Parses and keeps the top-level factorization.
pub fn parse_expression(text: &str, cap: u32) -> Result<GermExpression> {
    let toks = lex(text)?;
    let mut parser = Parser { toks, k: 0, end: text.len(), cap, _src: text };
    let v = parser.expr(0)?;
    if parser.k < parser.toks.len() {
        return Err(parser.err::<()>("unexpected ')'").unwrap_err().into());
    }
    check_degree(&v.poly, cap)?;
    let factors: Vec<(P, u32)> = v
        .factors
        .into_iter()
        .filter(|(p, e)| *e > 0 && p.total_degree() > 0)
        .collect();
    let factors = if factors.len() >= 2 || factors.first().is_some_and(|f| f.1 > 1) {
        Some(factors)
    } else {
        None
    };
    Ok(GermExpression { source: text.to_string(), poly: v.poly, factors })
}

/// Parses and requires the polynomial to vanish at the origin.
pub fn parse_germ(text: &str) -> Result<GermExpression> {
    let g = parse_expression(text, DEFAULT_DEGREE_CAP)?;
    if g.poly.is_zero() {
        return Err(GermError::ZeroPolynomial);
    }
    let c = g.poly.constant_term();
    if !c.is_zero() {
        return Err(GermError::NotAGerm(c.to_string()));
    }
    Ok(g)
}

/// Renders a polynomial in the input grammar; re-parsing returns the same polynomial.
pub fn print_poly(p: &P) -> String {
    p.to_string()
}

impl fmt::Display for GermExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_poly(&self.poly))
    }
}

#[allow(dead_code)]
fn gaussian_from(re: i64, im: i64) -> Gaussian {
    Gaussian::new(Rational::from_int(re), Rational::from_int(im))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> P {
        P::x()
    }
    fn y() -> P {
        P::y()
    }

    #[test]
    fn cusp() {
        assert_eq!(parse_poly("x^2 - y^3").unwrap(), x().pow(2) - y().pow(3));
    }

    #[test]
    fn product_with_i() {
        let p = parse_poly("(x - y)^2 * (x + i*y)").unwrap();
        let iy = y().scale(&Gaussian::i());
        assert_eq!(p, (x() - y()).pow(2) * (x() + iy));
        let g = parse_expression("(x - y)^2 * (x + i*y)", 64).unwrap();
        assert_eq!(g.factors.unwrap().len(), 2);
    }

    #[test]
    fn rejects_variable_exponent() {
        let e = parse_poly("x^y").unwrap_err();
        match e {
            GermError::Parse(pe) => assert_eq!(pe.pos, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_juxtaposition() {
        assert!(parse_poly("2x").is_err());
        assert!(parse_poly("x y").is_err());
        assert!(parse_poly("(x)(y)").is_err());
    }

    #[test]
    fn precedence() {
        assert_eq!(parse_poly("-x^2").unwrap(), -(x().pow(2)));
        assert_eq!(parse_poly("2^3^2").unwrap(), P::constant(gaussian_from(512, 0)));
        assert_eq!(parse_poly("x - y - x").unwrap(), -y());
        assert_eq!(parse_poly("3/2*x").unwrap(), x().scale(&Gaussian::real(crate::arith::rat(3, 2))));
        assert_eq!(parse_poly("x/2").unwrap(), x().scale(&Gaussian::real(crate::arith::rat(1, 2))));
    }

    #[test]
    fn errors() {
        assert!(parse_poly("x +").is_err());
        assert!(parse_poly("(x").is_err());
        assert!(parse_poly("x)").is_err());
        assert!(parse_poly("x / y").is_err());
        assert!(parse_poly("x^(1/2)").is_err());
        assert!(parse_poly("x ^ -1").is_err());
        assert!(parse_poly("x & y").is_err());
        assert!(matches!(parse_poly("x^65"), Err(GermError::Parse(_))));
        assert!(matches!(parse_germ("x+1"), Err(GermError::NotAGerm(_))));
    }

    #[test]
    fn round_trip() {
        for s in ["x^2 - y^3", "(x - y)^2 * (x + i*y)", "x*y - 1/3*y^4 + (2 - i)*x^3", "-x"] {
            let p = parse_poly(s).unwrap();
            assert_eq!(parse_poly(&print_poly(&p)).unwrap(), p, "{s}");
        }
    }
}
