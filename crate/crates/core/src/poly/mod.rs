//! Exact sparse multivariate polynomials with integer coefficients.
//!
//! Variables are addressed by index into a [`VariableOrder`]; index 0 is the
//! least variable. Terms are kept in a `BTreeMap` keyed by exponent vector
//! under graded lexicographic order, so structural equality is polynomial
//! equality.

mod parse;
mod recursive;

pub use parse::{parse_polynomial, ParseError};
pub use recursive::RecPoly;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("variable context mismatch: {0} vs {1} variables")]
    ContextMismatch(usize, usize),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable index {0} out of range")]
    VariableOutOfRange(usize),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("invalid variable order: {0}")]
    InvalidOrder(String),
}

/// Ordered variable names, least variable first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableOrder {
    names: Vec<String>,
}

impl VariableOrder {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, PolyError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(PolyError::InvalidOrder("no variables".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || !n.chars().next().unwrap().is_alphabetic() {
                return Err(PolyError::InvalidOrder(format!("bad variable name `{n}`")));
            }
            if names[..i].contains(n) {
                return Err(PolyError::InvalidOrder(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Self { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, PolyError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    /// The greatest variable.
    pub fn greatest(&self) -> usize {
        self.names.len() - 1
    }
}

/// Exponent vector, one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    // graded lex, greatest variable most significant
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.iter().rev().cmp(other.0.iter().rev()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Polynomial {
    /// Deterministic total order: by variable count, then terms from the
    /// leading one down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.nvars.cmp(&other.nvars).then_with(|| {
            let a = self.terms.iter().rev();
            let b = other.terms.iter().rev();
            a.cmp(b)
        })
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("x{i}")).collect();
        write!(f, "{}", self.format_with(&names))
    }
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(nvars), c);
        }
        Self { nvars, terms }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    /// The polynomial `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(BigInt::one(), Monomial(e))
    }

    pub fn monomial(c: BigInt, m: Monomial) -> Self {
        let nvars = m.0.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { nvars, terms }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Univariate polynomial in `var` from ascending coefficients.
    pub fn univariate(nvars: usize, var: usize, coeffs: &[BigInt]) -> Self {
        let mut p = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; nvars];
            e[var] = k as u32;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|&e| e == 0))
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    /// Coefficient of the leading term under graded lex order.
    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.terms.values().next_back()
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            Err(PolyError::ContextMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        Ok(r)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), -c);
        }
        Ok(r)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let mut r = Self::zero(self.nvars);
        if self.is_zero() || other.is_zero() {
            return Ok(r);
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                r.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(r)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.nvars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Degree in `v`; `None` stands for the zero polynomial's negative infinity.
    pub fn degree_in(&self, v: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[v]).max()
    }

    /// Degree in `v` with the zero polynomial counted as 0, as every
    /// degree-sum measure requires.
    pub fn degree_measure(&self, v: usize) -> u32 {
        self.degree_in(v).unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Sum of the total degrees of all monomials.
    pub fn sotd(&self) -> u64 {
        self.terms.keys().map(|m| m.total_degree() as u64).sum()
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.0[v] > 0)
    }

    /// Greatest variable occurring, `None` for constants.
    pub fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.uses_var(v))
    }

    pub fn vars_used(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.uses_var(v)).collect()
    }

    /// Coefficients as a polynomial in `v`, lowest power first.
    pub fn coeffs_in(&self, v: usize) -> Vec<Polynomial> {
        let d = match self.degree_in(v) {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut out = vec![Self::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut e = m.clone();
            e.0[v] = 0;
            out[k].terms.insert(e, c.clone());
        }
        out
    }

    pub fn from_coeffs_in(nvars: usize, v: usize, coeffs: &[Polynomial]) -> Self {
        let mut r = Self::zero(nvars);
        for (k, c) in coeffs.iter().enumerate() {
            for (m, x) in &c.terms {
                let mut e = m.clone();
                e.0[v] += k as u32;
                r.add_term(e, x.clone());
            }
        }
        r
    }

    /// Leading coefficient with respect to `v` (a polynomial free of `v`).
    pub fn lc_in(&self, v: usize) -> Polynomial {
        self.coeffs_in(v).pop().unwrap_or_else(|| Self::zero(self.nvars))
    }

    /// `p - lc_v(p) * v^deg`.
    pub fn reductum_in(&self, v: usize) -> Polynomial {
        let mut c = self.coeffs_in(v);
        c.pop();
        Self::from_coeffs_in(self.nvars, v, &c)
    }

    pub fn derivative(&self, v: usize) -> Polynomial {
        let mut r = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.0[v];
            if k > 0 {
                let mut e = m.clone();
                e.0[v] -= 1;
                r.add_term(e, c * BigInt::from(k));
            }
        }
        r
    }

    /// Positive gcd of the integer coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide by the integer content.
    pub fn primitive(&self) -> Polynomial {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Self {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c / &g)).collect(),
        }
    }

    /// Sign of the coefficient of the lexicographically greatest term
    /// (greatest variable most significant). This is the sign of the
    /// leading coefficient in the main variable, taken recursively.
    pub fn lex_leading_sign(&self) -> i32 {
        let best = self
            .terms
            .iter()
            .max_by(|a, b| a.0 .0.iter().rev().cmp(b.0 .0.iter().rev()));
        match best {
            None => 0,
            Some((_, c)) if c.is_negative() => -1,
            Some(_) => 1,
        }
    }

    /// Primitive with positive recursive leading coefficient.
    pub fn normalized(&self) -> Polynomial {
        let p = self.primitive();
        if p.lex_leading_sign() < 0 {
            -p
        } else {
            p
        }
    }

    pub fn evaluate(&self, point: &[BigRational]) -> BigRational {
        assert!(point.len() >= self.nvars);
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluate with possibly unbound variables; errors if an unbound
    /// variable occurs.
    pub fn evaluate_partial(&self, point: &[Option<BigRational>]) -> Result<BigRational, usize> {
        for v in self.vars_used() {
            if point.get(v).map_or(true, Option::is_none) {
                return Err(v);
            }
        }
        let full: Vec<BigRational> = (0..self.nvars)
            .map(|v| point.get(v).cloned().flatten().unwrap_or_else(BigRational::zero))
            .collect();
        Ok(self.evaluate(&full))
    }

    /// Substitute `v := r`, scaled by `den(r)^deg_v` so the result stays
    /// integral. The scale factor is positive, so signs are preserved.
    pub fn substitute(&self, v: usize, r: &BigRational) -> Polynomial {
        let d = match self.degree_in(v) {
            Some(d) => d,
            None => return self.clone(),
        };
        let num = r.numer();
        let den = r.denom();
        let mut num_pows = vec![BigInt::one()];
        let mut den_pows = vec![BigInt::one()];
        for _ in 0..d {
            num_pows.push(num_pows.last().unwrap() * num);
            den_pows.push(den_pows.last().unwrap() * den);
        }
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.0[v] as usize;
            let mut e = m.clone();
            e.0[v] = 0;
            out.add_term(e, c * &num_pows[k] * &den_pows[d as usize - k]);
        }
        out
    }

    /// Dense coefficient vector of a polynomial in `v` only.
    pub fn to_dense(&self, v: usize) -> Option<Vec<BigInt>> {
        let mut out = vec![BigInt::zero(); self.degree_in(v).map_or(0, |d| d as usize + 1)];
        for (m, c) in &self.terms {
            if m.0.iter().enumerate().any(|(i, &e)| i != v && e > 0) {
                return None;
            }
            out[m.0[v] as usize] = c.clone();
        }
        Some(out)
    }

    /// Exact division; `None` if `other` does not divide `self` in Z[vars].
    pub fn div_exact(&self, other: &Polynomial) -> Option<Polynomial> {
        assert_eq!(self.nvars, other.nvars);
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(self.nvars));
        }
        if let Some(c) = other.constant_value() {
            let mut q = Self::zero(self.nvars);
            for (m, x) in &self.terms {
                let (d, r) = x.div_rem(&c);
                if !r.is_zero() {
                    return None;
                }
                q.terms.insert(m.clone(), d);
            }
            return Some(q);
        }
        let (lm, lc) = other.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut q = Self::zero(self.nvars);
        while let Some((m, c)) = rem.terms.iter().next_back() {
            if !lm.divides(m) {
                return None;
            }
            let (cq, r) = c.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            let mq = m.div(lm);
            let t = Self::monomial(cq.clone(), mq.clone());
            rem = &rem - &(&t * other);
            q.add_term(mq, cq);
        }
        Some(q)
    }

    /// Sign-normalized: positive recursive leading coefficient, integer
    /// content kept.
    pub fn sign_normalized(&self) -> Polynomial {
        if self.lex_leading_sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Greatest common divisor in Z[vars] with positive recursive leading
    /// coefficient. Integer content is part of the result.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.nvars, other.nvars);
        if self.is_zero() {
            return other.sign_normalized();
        }
        if other.is_zero() {
            return self.sign_normalized();
        }
        let ic = self.content().gcd(&other.content());
        let g = primitive_gcd(&self.primitive(), &other.primitive());
        g.scale(&ic).sign_normalized()
    }

    /// Content with respect to `v`: gcd of the coefficients in `v`.
    pub fn content_in(&self, v: usize) -> Polynomial {
        let mut g = Self::zero(self.nvars);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = g.gcd(&c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map_or(false, |c| c.is_one())
    }

    /// Square-free part with respect to `v`: `p / gcd(p, dp/dv)`, normalized.
    pub fn squarefree_in(&self, v: usize) -> Polynomial {
        if self.degree_in(v).unwrap_or(0) == 0 {
            return self.normalized();
        }
        let g = self.gcd(&self.derivative(v));
        self.div_exact(&g).expect("gcd divides").normalized()
    }

    /// Render with the given variable names, e.g. `4*x^2 - 520*x + 672`.
    pub fn format_with<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            let is_const = m.0.iter().all(|&e| e == 0);
            if !abs.is_one() || is_const {
                factors.push(abs.to_string());
            }
            for (v, &e) in m.0.iter().enumerate().rev() {
                match e {
                    0 => {}
                    1 => factors.push(names[v].as_ref().to_string()),
                    _ => factors.push(format!("{}^{}", names[v].as_ref(), e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }

    pub fn display<'a>(&'a self, order: &'a VariableOrder) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Polynomial, &'a VariableOrder);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0.format_with(self.1.names()))
            }
        }
        D(self, order)
    }
}

fn primitive_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let nvars = a.nvars;
    let v = match (a.main_var(), b.main_var()) {
        (None, None) => return Polynomial::one(nvars),
        (x, y) => x.max(y).unwrap(),
    };
    if !a.uses_var(v) {
        return a.gcd(&b.content_in(v)).primitive();
    }
    if !b.uses_var(v) {
        return b.gcd(&a.content_in(v)).primitive();
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let mut x = RecPoly::new(&a.div_exact(&ca).expect("content divides"), v);
    let mut y = RecPoly::new(&b.div_exact(&cb).expect("content divides"), v);
    if x.degree() < y.degree() {
        std::mem::swap(&mut x, &mut y);
    }
    let last = loop {
        let r = x.prem(&y);
        if r.is_zero() {
            break y.to_poly();
        }
        if r.degree() == 0 {
            break Polynomial::one(nvars);
        }
        let rp = r.to_poly();
        let c = rp.content_in(v);
        x = y;
        y = RecPoly::new(&rp.div_exact(&c).expect("content divides"), v);
    };
    let last = last.div_exact(&last.content_in(v)).expect("content divides");
    (&ca.gcd(&cb) * &last).primitive()
}

/// Sum of total degrees over a set of polynomials.
pub fn sotd<'a>(polys: impl IntoIterator<Item = &'a Polynomial>) -> u64 {
    polys.into_iter().map(Polynomial::sotd).sum()
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial {
                self.$try(rhs).expect("polynomial context mismatch")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$try(&rhs).expect("polynomial context mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(mut self) -> Polynomial {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -self.clone()
    }
}
