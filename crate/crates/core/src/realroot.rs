//! Real roots of univariate integer polynomials and real algebraic numbers.
//!
//! Isolation uses Descartes' rule of signs with bisection on the square-free
//! part. Sturm sequences count roots and back the tests.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::Polynomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("zero polynomial has infinitely many roots")]
    ZeroPolynomial,
    #[error("polynomial is not univariate in the requested variable")]
    NotUnivariate,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Dense univariate polynomial over Z, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly(Vec<BigInt>);

impl UPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Self(c)
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// View `p` as a polynomial in variable `v` alone.
    pub fn from_poly(p: &Polynomial, v: usize) -> Result<Self, RootError> {
        p.to_dense(v).map(Self::new).ok_or(RootError::NotUnivariate)
    }

    pub fn to_poly(&self, nvars: usize, v: usize) -> Polynomial {
        Polynomial::univariate(nvars, v, &self.0)
    }

    /// `den*x - num`, the defining polynomial of a rational.
    pub fn linear_for(r: &BigRational) -> Self {
        Self::new(vec![-r.numer().clone(), r.denom().clone()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn lc(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Sign of `p(x)` using integer Horner on `den^d p(num/den)`.
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let (n, d) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut dp = BigInt::one();
        for c in self.0.iter().rev() {
            acc = acc * n + c * &dp;
            dp *= d;
        }
        sign_of(&acc)
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.0.iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect())
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive with positive leading coefficient.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        Self(self.0.iter().map(|c| c / &g).collect())
    }

    /// Pseudo-remainder: `lc(b)^(m-n+1) a mod b`.
    pub fn prem(&self, b: &UPoly) -> UPoly {
        assert!(!b.is_zero());
        let n = b.degree();
        if self.degree() < n || self.is_zero() {
            return self.clone();
        }
        let lb = b.lc();
        let mut r = self.0.clone();
        for k in (n..=self.degree()).rev() {
            let lr = r[k].clone();
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (j, bc) in b.0.iter().enumerate() {
                r[j + k - n] -= &lr * bc;
            }
            r.pop();
        }
        UPoly::new(r)
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.normalized(), other.normalized());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b).normalized();
            a = b;
            b = r;
        }
        a
    }

    /// Exact division by a divisor; panics if inexact.
    pub fn div_exact(&self, d: &UPoly) -> UPoly {
        let n = d.degree();
        let mut r: Vec<BigRational> = self.0.iter().map(|c| rat(c.clone())).collect();
        let lc = rat(d.lc());
        if self.degree() < n {
            return UPoly::new(vec![]);
        }
        let mut q = vec![BigRational::zero(); self.degree() - n + 1];
        for k in (n..=self.degree()).rev() {
            let t = &r[k] / &lc;
            for (j, c) in d.0.iter().enumerate() {
                r[j + k - n] -= &t * rat(c.clone());
            }
            q[k - n] = t;
        }
        assert!(r.iter().all(Zero::is_zero), "inexact polynomial division");
        let den = q.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        UPoly::new(q.into_iter().map(|c| (c * rat(den.clone())).to_integer()).collect())
    }

    pub fn squarefree(&self) -> UPoly {
        if self.degree() == 0 {
            return self.normalized();
        }
        let g = self.gcd(&self.derivative());
        self.div_exact(&g).normalized()
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::new(vec![]);
        }
        let mut c = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    /// Strict bound: every real root satisfies `|r| < bound`. Uses
    /// Fujiwara's bound `2 max |a_{n-k} / a_n|^{1/k}`, rounded up.
    pub fn root_bound(&self) -> BigInt {
        let n = self.degree();
        let lc = self.lc().abs();
        let mut m = BigInt::zero();
        for k in 1..=n {
            let c = self.0[n - k].abs();
            if c.is_zero() {
                continue;
            }
            let mut ratio = c.div_ceil(&lc);
            if k == n {
                // the constant term enters halved
                ratio = ratio.div_ceil(&BigInt::from(2));
            }
            let r = ratio.nth_root(k as u32) + 1;
            m = m.max(r);
        }
        m * 2 + 1
    }

    /// Sturm sequence with integer coefficients and corrected signs.
    pub fn sturm_sequence(&self) -> Vec<UPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            let (a, b) = (&seq[n - 2], &seq[n - 1]);
            if b.is_zero() {
                seq.pop();
                break;
            }
            let r = a.prem(b);
            if r.is_zero() {
                break;
            }
            let delta = a.degree() - b.degree() + 1;
            let flip = b.lc().is_negative() && delta % 2 == 1;
            let g = r.content();
            let k = if flip { g } else { -g };
            seq.push(UPoly::new(r.0.iter().map(|c| c / &k).collect()));
        }
        seq
    }

    /// Distinct real roots in `(a, b]`.
    pub fn sturm_count(&self, a: &BigRational, b: &BigRational) -> usize {
        let seq = self.sturm_sequence();
        variations_at(&seq, a) - variations_at(&seq, b)
    }

    /// Descartes bound on the number of roots in the open interval `(a, b)`.
    pub fn descartes(&self, a: &BigRational, b: &BigRational) -> usize {
        // d^n p((an + wn t) / d) with integer coefficients, by Horner
        let d = a.denom().lcm(b.denom());
        let an = a.numer() * (&d / a.denom());
        let wn = b.numer() * (&d / b.denom()) - &an;
        let mut q: Vec<BigInt> = Vec::with_capacity(self.0.len());
        let mut dk = BigInt::one();
        for c in self.0.iter().rev() {
            let mut next = vec![BigInt::zero(); q.len() + 1];
            for (i, qi) in q.iter().enumerate() {
                next[i] += qi * &an;
                next[i + 1] += qi * &wn;
            }
            next[0] += c * &dk;
            dk *= &d;
            q = next;
        }
        // roots in (0, 1) of q map to positive roots of (1 + t)^n q(1 / (1 + t))
        q.reverse();
        let n = q.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let t = q[j + 1].clone();
                q[j] += t;
            }
        }
        sign_variations(q.iter().map(sign_of))
    }

    /// Isolate the distinct real roots, ascending.
    pub fn isolate(&self) -> Result<Vec<AlgebraicNumber>, RootError> {
        if self.is_zero() {
            return Err(RootError::ZeroPolynomial);
        }
        let p = self.squarefree();
        if p.degree() == 0 {
            return Ok(vec![]);
        }
        let b = rat(p.root_bound());
        let mut out = Vec::new();
        let mut work = vec![(-b.clone(), b)];
        while let Some((lo, hi)) = work.pop() {
            match p.descartes(&lo, &hi) {
                0 => {}
                1 => out.push(AlgebraicNumber::from_isolating(p.clone(), lo, hi).with_simple_rational()),
                _ => {
                    let m = (&lo + &hi) / rat(2);
                    if p.sign_at(&m) == 0 {
                        out.push(AlgebraicNumber::rational(m.clone()));
                    }
                    work.push((lo, m.clone()));
                    work.push((m, hi));
                }
            }
        }
        out.sort_by(|a, b| a.lo.cmp(&b.lo));
        Ok(out)
    }
}

pub(crate) fn sign_of<T: Signed>(x: &T) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

pub(crate) fn sign_variations(signs: impl IntoIterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

fn variations_at(seq: &[UPoly], x: &BigRational) -> usize {
    sign_variations(seq.iter().map(|p| p.sign_at(x)))
}

/// A real algebraic number: the unique root of a square-free `poly` in the
/// open interval `(lo, hi)`, or the rational `lo` when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraicNumber {
    poly: UPoly,
    lo: BigRational,
    hi: BigRational,
}

impl AlgebraicNumber {
    pub fn rational(r: BigRational) -> Self {
        Self { poly: UPoly::linear_for(&r), lo: r.clone(), hi: r }
    }

    /// Root of square-free `p` in `(lo, hi)`, the only one there. Endpoints
    /// that are themselves roots get moved inward.
    pub fn from_isolating(p: UPoly, lo: BigRational, hi: BigRational) -> Self {
        let mut a = Self { poly: p, lo, hi };
        while a.poly.sign_at(&a.lo) == 0 || a.poly.sign_at(&a.hi) == 0 {
            let m = a.mid();
            if a.poly.sign_at(&m) == 0 {
                return Self::rational(m);
            }
            if a.poly.descartes(&a.lo, &m) == 1 {
                a.hi = m;
            } else {
                a.lo = m;
            }
        }
        a
    }

    /// Replace the interval by an exact value when the root is an integer or
    /// half-integer.
    fn with_simple_rational(mut self) -> Self {
        while !self.is_rational() && self.width() > BigRational::one() {
            self.refine();
        }
        if self.is_rational() {
            return self;
        }
        let two = rat(2);
        let mut c = (&self.lo * &two).floor() + BigRational::one();
        while c < &self.hi * &two {
            let x = &c / &two;
            if self.poly.sign_at(&x) == 0 {
                return Self::rational(x);
            }
            c += BigRational::one();
        }
        self
    }

    pub fn poly(&self) -> &UPoly {
        &self.poly
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn is_rational(&self) -> bool {
        self.lo == self.hi
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.lo)
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / rat(2)
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64().unwrap_or(f64::NAN)
    }

    /// Halve the isolating interval; may discover the root is rational.
    pub fn refine(&mut self) {
        if self.is_rational() {
            return;
        }
        let m = self.mid();
        let s = self.poly.sign_at(&m);
        if s == 0 {
            *self = Self::rational(m);
        } else if s == self.poly.sign_at(&self.lo) {
            self.lo = m;
        } else {
            self.hi = m;
        }
    }

    pub fn refine_to(&mut self, width: &BigRational) {
        while !self.is_rational() && &self.width() > width {
            self.refine();
        }
    }

    /// Exact sign of `p` at this number.
    pub fn sign_of(&mut self, p: &UPoly) -> i32 {
        if let Some(r) = self.as_rational() {
            return p.sign_at(r);
        }
        if p.is_zero() {
            return 0;
        }
        let g = self.poly.gcd(p);
        if g.degree() > 0 && g.sign_at(&self.lo) * g.sign_at(&self.hi) < 0 {
            return 0;
        }
        let seq = p.sturm_sequence();
        loop {
            let s = p.sign_at(&self.lo);
            if s != 0 && variations_at(&seq, &self.lo) == variations_at(&seq, &self.hi) {
                return s;
            }
            self.refine();
            if let Some(r) = self.as_rational() {
                return p.sign_at(r);
            }
        }
    }

    /// Where the rational `r` lies relative to this irrational number.
    fn place(&mut self, r: &BigRational) -> Ordering {
        loop {
            if r <= &self.lo {
                return Ordering::Less;
            }
            if r >= &self.hi {
                return Ordering::Greater;
            }
            if self.poly.sign_at(r) == 0 {
                return Ordering::Equal;
            }
            self.refine();
            if let Some(x) = self.as_rational() {
                return r.cmp(x);
            }
        }
    }

    /// Total order on real algebraic numbers.
    pub fn compare(&mut self, other: &mut AlgebraicNumber) -> Ordering {
        if let Some(a) = self.as_rational().cloned() {
            return match other.as_rational() {
                Some(b) => a.cmp(b),
                None => other.place(&a),
            };
        }
        if let Some(b) = other.as_rational().cloned() {
            return self.place(&b).reverse();
        }
        if self.hi <= other.lo {
            return Ordering::Less;
        }
        if other.hi <= self.lo {
            return Ordering::Greater;
        }
        // Overlapping intervals: equal exactly when the common factor has its
        // (necessarily unique) root in the overlap.
        let g = self.poly.gcd(&other.poly);
        if g.degree() > 0 {
            let l = (&self.lo).max(&other.lo).clone();
            let h = (&self.hi).min(&other.hi).clone();
            if g.sign_at(&l) * g.sign_at(&h) < 0 {
                return Ordering::Equal;
            }
        }
        loop {
            if self.hi <= other.lo {
                return Ordering::Less;
            }
            if other.hi <= self.lo {
                return Ordering::Greater;
            }
            self.refine();
            other.refine();
            if self.is_rational() || other.is_rational() {
                return self.compare(other);
            }
        }
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            write!(f, "{r}")
        } else {
            write!(f, "root of {:?} in ({}, {})", self.poly.0, self.lo, self.hi)
        }
    }
}

/// Merge several ascending root lists into one list of distinct roots.
pub fn merge_roots(lists: Vec<Vec<AlgebraicNumber>>) -> Vec<AlgebraicNumber> {
    let mut out: Vec<AlgebraicNumber> = Vec::new();
    for list in lists {
        for mut r in list {
            let mut pos = out.len();
            let mut dup = false;
            for (i, o) in out.iter_mut().enumerate() {
                match r.compare(o) {
                    Ordering::Less => {
                        pos = i;
                        break;
                    }
                    Ordering::Equal => {
                        dup = true;
                        break;
                    }
                    Ordering::Greater => {}
                }
            }
            if !dup {
                out.insert(pos, r);
            }
        }
    }
    out
}

/// Isolate the real roots of a univariate polynomial in `v`.
pub fn isolate(p: &Polynomial, v: usize) -> Result<Vec<AlgebraicNumber>, RootError> {
    UPoly::from_poly(p, v)?.isolate()
}

/// Number of distinct real roots across a set of univariate polynomials.
/// Nonzero constants contribute nothing.
pub fn ndrr<'a>(polys: impl IntoIterator<Item = &'a Polynomial>, v: usize) -> Result<usize, RootError> {
    let mut prod = UPoly::from_i64(&[1]);
    for p in polys {
        if p.is_zero() {
            return Err(RootError::ZeroPolynomial);
        }
        prod = prod.mul(&UPoly::from_poly(p, v)?.squarefree());
    }
    Ok(prod.isolate()?.len())
}

/// Sign of univariate `p` (in `v`) at `alpha`.
pub fn sign_at(p: &Polynomial, v: usize, alpha: &mut AlgebraicNumber) -> Result<i32, RootError> {
    Ok(alpha.sign_of(&UPoly::from_poly(p, v)?))
}

/// A simple rational strictly between `lo` and `hi` (`lo < hi`), preferring
/// integers of small magnitude.
pub fn simple_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    debug_assert!(lo < hi);
    if lo.is_negative() && hi.is_positive() {
        return BigRational::zero();
    }
    let c = lo.floor() + BigRational::one();
    if &c < hi {
        let f = hi.ceil() - BigRational::one();
        // closest to zero among integers in range
        return if c.is_negative() { f } else { c };
    }
    (lo + hi) / rat(2)
}

/// One rational in each sector of the real line cut by ascending `roots`.
pub fn sample_between(roots: &mut [AlgebraicNumber]) -> Vec<BigRational> {
    if roots.is_empty() {
        return vec![BigRational::zero()];
    }
    for i in 1..roots.len() {
        let (a, b) = roots.split_at_mut(i);
        let (x, y) = (&mut a[i - 1], &mut b[0]);
        while x.hi >= y.lo {
            x.refine();
            y.refine();
        }
    }
    let mut out = Vec::with_capacity(roots.len() + 1);
    out.push(roots[0].lo.ceil() - BigRational::one());
    for w in roots.windows(2) {
        out.push(simple_between(&w[0].hi, &w[1].lo));
    }
    out.push(roots.last().unwrap().hi.floor() + BigRational::one());
    out
}

/// Rational interval arithmetic for enclosures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RatInterval {
    pub fn point(x: BigRational) -> Self {
        Self { lo: x.clone(), hi: x }
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Self { lo, hi }
    }

    /// Exact range of `x^e` over the interval.
    pub fn pow(&self, e: u32) -> Self {
        let e = e as usize;
        let (a, b) = (num_traits::pow(self.lo.clone(), e), num_traits::pow(self.hi.clone(), e));
        if e % 2 == 1 || !self.lo.is_negative() {
            Self { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            Self { lo: b, hi: a }
        } else {
            Self { lo: BigRational::zero(), hi: a.max(b) }
        }
    }

    /// The sign if the interval excludes zero.
    pub fn sign(&self) -> Option<i32> {
        if self.lo.is_positive() {
            Some(1)
        } else if self.hi.is_negative() {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }

    pub fn abs_max(&self) -> BigRational {
        self.lo.abs().max(self.hi.abs())
    }
}

/// Enclose `p` over a box of per-variable intervals.
pub fn enclose(p: &Polynomial, boxes: &[RatInterval]) -> RatInterval {
    let mut powers: Vec<Vec<RatInterval>> = vec![Vec::new(); boxes.len()];
    let mut acc = RatInterval::point(BigRational::zero());
    for (m, c) in p.terms() {
        let mut t = RatInterval::point(BigRational::from_integer(c.clone()));
        for (v, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let cache = &mut powers[v];
            while cache.len() < e as usize {
                let next = boxes[v].pow(cache.len() as u32 + 1);
                cache.push(next);
            }
            t = t.mul(&cache[e as usize - 1]);
        }
        acc = acc.add(&t);
    }
    acc
}

/// Sign of `p` over a box if an enclosure decides it, computed in fixed
/// point: endpoints are rounded outward to multiples of `2^-prec`, so the
/// whole evaluation runs on integers without gcd normalisation.
pub fn enclose_sign(p: &Polynomial, boxes: &[RatInterval]) -> Option<i32> {
    let vars = p.vars_used();
    let mut prec: u64 = 64;
    for &v in &vars {
        let b = &boxes[v];
        let w = &b.hi - &b.lo;
        let need = if w.is_zero() {
            b.lo.denom().bits() + 32
        } else {
            (w.denom().bits() + 32).saturating_sub(w.numer().bits())
        };
        prec = prec.max(need);
    }
    let scale = BigInt::one() << prec;
    let ints: Vec<Option<(BigInt, BigInt)>> = (0..boxes.len())
        .map(|v| {
            vars.contains(&v).then(|| {
                let b = &boxes[v];
                let lo = (&b.lo * BigRational::from_integer(scale.clone())).floor().to_integer();
                let hi = (&b.hi * BigRational::from_integer(scale.clone())).ceil().to_integer();
                (lo, hi)
            })
        })
        .collect();
    let top = p.total_degree().unwrap_or(0) as u64;
    let mut powers: Vec<Vec<(BigInt, BigInt)>> = vec![Vec::new(); boxes.len()];
    let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
    for (m, c) in p.terms() {
        let (mut a, mut b) = (c.clone(), c.clone());
        let mut deg = 0u64;
        for (v, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            deg += e as u64;
            let cache = &mut powers[v];
            let (x0, x1) = ints[v].as_ref().expect("variable in use");
            while cache.len() < e as usize {
                let k = cache.len() + 1;
                let (p0, p1) = (num_traits::pow(x0.clone(), k), num_traits::pow(x1.clone(), k));
                cache.push(if k % 2 == 1 || !x0.is_negative() {
                    (p0, p1)
                } else if !x1.is_positive() {
                    (p1, p0)
                } else {
                    (BigInt::zero(), p0.max(p1))
                });
            }
            let (y0, y1) = &cache[e as usize - 1];
            let prods = [&a * y0, &a * y1, &b * y0, &b * y1];
            a = prods.iter().min().unwrap().clone();
            b = prods.iter().max().unwrap().clone();
        }
        let shift = (prec * (top - deg)) as usize;
        lo += a << shift;
        hi += b << shift;
    }
    if lo.is_positive() {
        Some(1)
    } else if hi.is_negative() {
        Some(-1)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, VariableOrder};
    use proptest::prelude::*;

    fn px(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableOrder::new(["x"]).unwrap()).unwrap()
    }

    fn up(s: &str) -> UPoly {
        UPoly::from_poly(&px(s), 0).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn isolate_examples() {
        let r = up("x^2-1").isolate().unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].as_rational(), Some(&q(-1, 1)));
        assert_eq!(r[1].as_rational(), Some(&q(1, 1)));
        let mut r = up("2*x^2+x-2").isolate().unwrap();
        assert_eq!(r.len(), 2);
        for a in r.iter_mut() {
            a.refine_to(&q(1, 1000));
        }
        assert!((r[0].to_f64() + 1.28).abs() < 0.01);
        assert!((r[1].to_f64() - 0.78).abs() < 0.01);
        assert!(up("x^2+1").isolate().unwrap().is_empty());
        assert_eq!(UPoly::new(vec![]).isolate(), Err(RootError::ZeroPolynomial));
    }

    #[test]
    fn ndrr_examples() {
        assert_eq!(ndrr(&[px("x^2-1"), px("x-1")], 0).unwrap(), 2);
        assert_eq!(ndrr(&[px("x^2+1")], 0).unwrap(), 0);
        let set = [px("-4*x^2+4"), px("-4*x^2+40*x-96"), px("104*x^2-520*x+672")];
        // roots -1, 1, 4, 6; the resultant quadratic has negative discriminant
        assert_eq!(ndrr(&set, 0).unwrap(), 4);
        let lists = set.iter().map(|p| isolate(p, 0).unwrap()).collect();
        assert_eq!(merge_roots(lists).len(), 4);
        let b = rat(1000);
        let counts: usize = set.iter().map(|p| UPoly::from_poly(p, 0).unwrap().sturm_count(&-b.clone(), &b)).sum();
        assert_eq!(counts, 4);
        assert!(isolate(&set[2], 0).unwrap().is_empty());
        let c1 = [px("8*x"), px("-4*x^2+40*x-96"), px("4*x^4-76*x^3+561*x^2-1908*x+2500")];
        assert_eq!(ndrr(&c1, 0).unwrap(), 5);
        assert!(ndrr(&[Polynomial::zero(1)], 0).is_err());
    }

    #[test]
    fn sign_at_examples() {
        let mut sqrt2 = up("x^2-2").isolate().unwrap().pop().unwrap();
        assert_eq!(sign_at(&px("x^2-2"), 0, &mut sqrt2).unwrap(), 0);
        assert_eq!(sign_at(&px("x"), 0, &mut sqrt2).unwrap(), 1);
        assert_eq!(sign_at(&px("3*x-5"), 0, &mut sqrt2).unwrap(), -1);
        let mut a = up("4*x^4+4*x^3-7*x^2-4*x+4").isolate().unwrap().pop().unwrap();
        assert_eq!(sign_at(&px("2*x^2+x-2"), 0, &mut a).unwrap(), 0);
        assert_eq!(sign_at(&px("x^2-17"), 0, &mut a).unwrap(), -1);
    }

    #[test]
    fn sample_between_examples() {
        let mut roots = up("x^2-1").isolate().unwrap();
        let s = sample_between(&mut roots);
        assert_eq!(s, vec![q(-2, 1), q(0, 1), q(2, 1)]);
        assert_eq!(sample_between(&mut []), vec![q(0, 1)]);
        let mut roots = up("(x-4)*(x-6)").isolate().unwrap();
        let s = sample_between(&mut roots);
        assert!(s[0] < q(4, 1) && q(4, 1) < s[1] && s[1] < q(6, 1) && s[2] > q(6, 1));
        let mut roots = up("x^2-2").isolate().unwrap();
        let s = sample_between(&mut roots);
        assert!(&s[0] * &s[0] > q(2, 1) && s[0] < q(0, 1));
        assert!(&s[1] * &s[1] < q(2, 1));
    }

    #[test]
    fn compare_detects_equality() {
        let mut a = up("x^2-2").isolate().unwrap().pop().unwrap();
        let mut b = up("x^4-4").isolate().unwrap().pop().unwrap();
        assert_eq!(a.compare(&mut b), Ordering::Equal);
        let mut c = up("x^2-3").isolate().unwrap().pop().unwrap();
        assert_eq!(a.compare(&mut c), Ordering::Less);
        let mut one = AlgebraicNumber::rational(q(3, 2));
        assert_eq!(a.compare(&mut one), Ordering::Less);
        assert_eq!(one.compare(&mut a), Ordering::Greater);
    }

    fn arb_upoly() -> impl Strategy<Value = UPoly> {
        prop::collection::vec(-20i64..21, 1..8).prop_map(|c| UPoly::from_i64(&c))
    }

    proptest! {
        #[test]
        fn isolation_matches_sturm(p in arb_upoly()) {
            prop_assume!(!p.is_zero());
            let roots = p.isolate().unwrap();
            if p.degree() > 0 {
                let b = rat(p.root_bound());
                prop_assert_eq!(roots.len(), p.sturm_count(&-b.clone(), &b));
            }
            let sf = p.squarefree();
            for r in &roots {
                if let Some(x) = r.as_rational() {
                    prop_assert_eq!(p.sign_at(x), 0);
                } else {
                    prop_assert!(r.lo() < r.hi());
                    prop_assert_eq!(sf.sturm_count(r.lo(), r.hi()), 1);
                    prop_assert!(sf.sign_at(r.lo()) * sf.sign_at(r.hi()) < 0);
                }
            }
            for w in roots.windows(2) {
                prop_assert!(w[0].hi() <= w[1].lo());
            }
            prop_assert!(roots.len() <= p.degree());
        }

        #[test]
        fn ndrr_scale_invariant(p in arb_upoly(), k in 1i64..9) {
            prop_assume!(!p.is_zero());
            let a = p.to_poly(1, 0);
            let b = a.scale(&BigInt::from(-k));
            prop_assert_eq!(ndrr([&a], 0).unwrap(), ndrr([&b], 0).unwrap());
        }
    }
}
