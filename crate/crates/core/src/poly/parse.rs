//! Text grammar for polynomials:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | identifier | '(' expr ')'
//! ```
//!
//! Division is only allowed by constants. Rational results are cleared by
//! the positive lcm of denominators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{Monomial, Polynomial, VariableOrder};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub message: String,
    pub position: usize,
}

#[derive(Clone, Debug)]
struct RatPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl RatPoly {
    fn constant(nvars: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(nvars), c);
        }
        Self { nvars, terms }
    }

    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(e), BigRational::one());
        Self { nvars, terms }
    }

    fn add(mut self, other: &RatPoly, sign: i32) -> Self {
        for (m, c) in &other.terms {
            let e = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
            if sign < 0 {
                *e -= c;
            } else {
                *e += c;
            }
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    fn mul(&self, other: &RatPoly) -> Self {
        let mut out = RatPoly { nvars: self.nvars, terms: BTreeMap::new() };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = Monomial(ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect());
                *out.terms.entry(m).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }

    fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            if m.0.iter().all(|&e| e == 0) {
                return Some(c.clone());
            }
        }
        None
    }

    fn clear_denominators(&self) -> Polynomial {
        let l = self.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.0.clone(), (c * BigRational::from_integer(l.clone())).to_integer()));
        Polynomial::from_terms(self.nvars, terms)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    order: &'a VariableOrder,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { message: message.into(), position: self.pos })
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

    fn expr(&mut self) -> Result<RatPoly, ParseError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t, if c == b'+' { 1 } else { -1 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatPoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let f = self.unary()?;
            if c == b'*' {
                acc = acc.mul(&f);
            } else {
                match f.as_constant() {
                    Some(d) if !d.is_zero() => {
                        acc = acc.mul(&RatPoly::constant(acc.nvars, d.recip()));
                    }
                    Some(_) => return Err(ParseError { message: "division by zero".into(), position: at }),
                    None => {
                        return Err(ParseError {
                            message: "division by a non-constant".into(),
                            position: at,
                        })
                    }
                }
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatPoly, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let u = self.unary()?;
                Ok(RatPoly::constant(u.nvars, BigRational::zero()).add(&u, -1))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let n = self.integer()?;
            let e: u32 = n
                .try_into()
                .map_err(|_| ParseError { message: "exponent too large".into(), position: start })?;
            let mut acc = RatPoly::constant(base.nvars, BigRational::one());
            for _ in 0..e {
                acc = acc.mul(&base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<RatPoly, ParseError> {
        let n = self.order.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                if let Some(c) = self.src.get(self.pos) {
                    if c.is_ascii_alphabetic() || *c == b'_' || *c == b'(' {
                        return self.err("implicit multiplication is not allowed");
                    }
                }
                Ok(RatPoly::constant(n, BigRational::from_integer(v)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.order.index_of(name) {
                    Ok(i) => Ok(RatPoly::var(n, i)),
                    Err(_) => Err(ParseError {
                        message: format!("unknown variable `{name}`"),
                        position: start,
                    }),
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a polynomial over `order`. Rational coefficients are cleared by a
/// positive common denominator.
pub fn parse_polynomial(text: &str, order: &VariableOrder) -> Result<Polynomial, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, order };
    let r = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(r.clear_denominators())
}
