//! Exact sign evaluation at points whose coordinates are real algebraic
//! numbers defined over the coordinates before them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::deadline::Deadline;
use crate::elim::{subresultant_prs, PrsStep};
use crate::poly::{Polynomial, RecPoly};
use crate::realroot::{enclose, enclose_sign, simple_between, AlgebraicNumber, RatInterval, UPoly};

/// One coordinate of a sample point.
///
/// `Alg` is the unique root in the open interval `(lo, hi)` of `f`, a
/// polynomial whose main variable is this coordinate. Over the earlier
/// coordinates `f` is square-free with nonvanishing leading coefficient, and
/// `f` has opposite nonzero signs at the two endpoints (`slo` at `lo`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Coord {
    Rat(BigRational),
    Alg { f: Polynomial, lo: BigRational, hi: BigRational, slo: i32 },
}

impl Coord {
    pub fn lower(&self) -> &BigRational {
        match self {
            Coord::Rat(r) => r,
            Coord::Alg { lo, .. } => lo,
        }
    }

    pub fn upper(&self) -> &BigRational {
        match self {
            Coord::Rat(r) => r,
            Coord::Alg { hi, .. } => hi,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coord::Rat(_))
    }

    pub fn interval(&self) -> RatInterval {
        RatInterval::new(self.lower().clone(), self.upper().clone())
    }

    pub fn to_f64(&self) -> f64 {
        ((self.lower() + self.upper()) / BigRational::from_integer(2.into())).to_f64().unwrap_or(f64::NAN)
    }

    /// A rational strictly below the value.
    pub fn below(&self) -> BigRational {
        self.lower().ceil() - BigRational::one()
    }

    /// A rational strictly above the value.
    pub fn above(&self) -> BigRational {
        self.upper().floor() + BigRational::one()
    }

    /// Some rational strictly between `self < other`, if the current
    /// intervals already separate them.
    pub fn gap(&self, other: &Coord) -> Option<BigRational> {
        let (a, b) = (self.upper(), other.lower());
        if a < b {
            Some(simple_between(a, b))
        } else if a == b && !self.is_rational() && !other.is_rational() {
            Some(a.clone())
        } else {
            None
        }
    }

    /// A level-one coordinate as a univariate algebraic number.
    pub fn to_algebraic(&self, v: usize) -> AlgebraicNumber {
        match self {
            Coord::Rat(r) => AlgebraicNumber::rational(r.clone()),
            Coord::Alg { f, lo, hi, .. } => {
                let u = UPoly::from_poly(f, v).expect("level-one coordinate is univariate");
                AlgebraicNumber::from_isolating(u, lo.clone(), hi.clone())
            }
        }
    }
}

fn rsign(c: &BigInt) -> i32 {
    if c.is_positive() {
        1
    } else if c.is_negative() {
        -1
    } else {
        0
    }
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// A point in a prefix of `n`-space.
///
/// Once the optional deadline passes, every query returns promptly with a
/// meaningless answer; callers check [`Point::expired`] afterwards.
#[derive(Clone, Debug)]
pub struct Point {
    n: usize,
    coords: Vec<Coord>,
    /// Cached sign of each algebraic coordinate's leading coefficient.
    lc_signs: Vec<Option<i32>>,
    prs: Rc<RefCell<HashMap<(Polynomial, Polynomial, usize), Rc<Vec<PrsStep>>>>>,
    deadline: Deadline,
    expired: bool,
    /// Per coordinate, polynomials of the stack it came from mapped to
    /// whether they vanish there.
    known: Vec<Option<Rc<HashMap<Polynomial, bool>>>>,
}

/// Roots of a stack together with, for each root, the indices of the input
/// polynomials vanishing there, and the indices of nullified inputs.
#[derive(Clone, Debug, Default)]
pub struct TaggedRoots {
    pub roots: Vec<Coord>,
    pub tags: Vec<Vec<usize>>,
    pub nullified: Vec<usize>,
}

impl Point {
    pub fn new(n: usize) -> Self {
        Self::from_coords(n, Vec::new())
    }

    pub fn from_coords(n: usize, coords: Vec<Coord>) -> Self {
        let lc_signs = vec![None; coords.len()];
        let known = vec![None; coords.len()];
        Self { n, coords, lc_signs, prs: Rc::default(), deadline: Deadline::none(), expired: false, known }
    }

    pub fn with_deadline(mut self, d: Deadline) -> Self {
        self.deadline = d;
        self
    }

    /// Whether the deadline passed during some query.
    pub fn expired(&self) -> bool {
        self.expired
    }

    fn out_of_time(&mut self) -> bool {
        if !self.expired && self.deadline.expired() {
            self.expired = true;
        }
        self.expired
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn push(&mut self, c: Coord) {
        self.coords.push(c);
        self.lc_signs.push(None);
        self.known.push(None);
    }

    /// Push a coordinate whose vanishing pattern on `known` is already
    /// established. Signs of those polynomials then skip the exact zero test.
    pub fn push_known(&mut self, c: Coord, known: Rc<HashMap<Polynomial, bool>>) {
        self.push(c);
        *self.known.last_mut().unwrap() = Some(known);
    }

    pub fn pop(&mut self) -> Option<Coord> {
        self.lc_signs.pop();
        self.known.pop();
        self.coords.pop()
    }

    pub fn all_rational(&self) -> bool {
        self.coords.iter().all(Coord::is_rational)
    }

    fn subst(&self, p: &Polynomial) -> Polynomial {
        let mut p = p.clone();
        for (v, c) in self.coords.iter().enumerate() {
            if let Coord::Rat(r) = c {
                if p.uses_var(v) {
                    p = p.substitute(v, r);
                }
            }
        }
        p
    }

    /// A positive multiple of `p` at the point, pseudo-reduced modulo the
    /// defining polynomial of every algebraic coordinate.
    fn reduce(&mut self, p: Polynomial) -> Polynomial {
        let mut p = p;
        for j in (0..self.len()).rev() {
            let Coord::Alg { f, .. } = &self.coords[j] else { continue };
            let (dp, df) = (p.degree_in(j).unwrap_or(0), f.degree_in(j).unwrap_or(0));
            if dp < df {
                continue;
            }
            let f = f.clone();
            let s = match self.lc_signs[j] {
                Some(s) => s,
                None => {
                    let s = self.sign(&f.lc_in(j));
                    self.lc_signs[j] = Some(s);
                    s
                }
            };
            if s == 0 {
                continue;
            }
            let r = RecPoly::new(&p, j).prem(&RecPoly::new(&f, j)).to_poly().primitive();
            p = if s < 0 && (dp - df + 1) % 2 == 1 { -r } else { r };
        }
        p
    }

    fn boxes(&self) -> Vec<RatInterval> {
        let mut b: Vec<RatInterval> = self.coords.iter().map(Coord::interval).collect();
        b.resize(self.n, RatInterval::point(BigRational::zero()));
        b
    }

    /// Exact sign of `p`, which must only involve bound coordinates.
    pub fn sign(&mut self, p: &Polynomial) -> i32 {
        let mut tested = false;
        if let Some(Some(known)) = p.main_var().and_then(|j| self.known.get(j)) {
            match known.get(p) {
                Some(true) => return 0,
                Some(false) => tested = true,
                None => {}
            }
        }
        let p = self.subst(p);
        if let Some(c) = p.constant_value() {
            return rsign(&c);
        }
        debug_assert!(p.main_var().unwrap() < self.len(), "unbound variable");
        let p = self.reduce(p);
        if let Some(c) = p.constant_value() {
            return rsign(&c);
        }
        let vars = p.vars_used();
        let mut iters = 0;
        loop {
            if self.out_of_time() {
                return 0;
            }
            iters += 1;
            let boxes = self.boxes();
            if let Some(s) = enclose_sign(&p, &boxes) {
                return s;
            }
            if vars.iter().all(|&v| boxes[v].lo == boxes[v].hi) {
                if let Some(s) = enclose(&p, &boxes).sign() {
                    return s;
                }
            }
            // a long run without a decision is checked exactly even for
            // polynomials already known not to vanish
            if !tested || iters == 64 {
                tested = true;
                if self.is_zero_at(&p) {
                    return 0;
                }
            }
            for &v in &vars {
                self.refine(v);
            }
        }
    }

    /// Zero test for `p` with rational coordinates already substituted.
    fn is_zero_at(&mut self, p: &Polynomial) -> bool {
        let Some(k) = p.main_var() else { return p.is_zero() };
        let p = self.truncate(p, k);
        if !p.uses_var(k) {
            return self.sign(&p) == 0;
        }
        let Coord::Alg { f, .. } = &self.coords[k] else {
            return self.sign(&p) == 0;
        };
        let f = f.clone();
        let g = self.gcd_k(&f, &p, k);
        if !g.uses_var(k) {
            return false;
        }
        let (lo, hi) = match &self.coords[k] {
            Coord::Alg { lo, hi, .. } => (lo.clone(), hi.clone()),
            Coord::Rat(_) => unreachable!("coordinate only changes inside refine"),
        };
        let a = self.sign(&g.substitute(k, &lo));
        let b = self.sign(&g.substitute(k, &hi));
        a * b < 0
    }

    /// Drop leading terms in `x_k` whose coefficients vanish at the point.
    pub fn truncate(&mut self, p: &Polynomial, k: usize) -> Polynomial {
        let mut p = p.clone();
        while p.uses_var(k) {
            let lc = p.lc_in(k);
            if self.sign(&lc) == 0 {
                p = p.reductum_in(k);
            } else {
                break;
            }
        }
        p
    }

    fn shrink(p: Polynomial, k: usize) -> Polynomial {
        if p.uses_var(k) {
            let c = p.content_in(k);
            if !c.is_constant() {
                return p.div_exact(&c).expect("content divides");
            }
        }
        p.primitive()
    }

    /// A gcd in `x_k` over the field generated by the earlier coordinates.
    fn gcd_k(&mut self, a: &Polynomial, b: &Polynomial, k: usize) -> Polynomial {
        let mut a = self.truncate(a, k);
        let mut b = self.truncate(b, k);
        if a.degree_measure(k) < b.degree_measure(k) {
            std::mem::swap(&mut a, &mut b);
        }
        if !b.uses_var(k) {
            return if self.sign(&b) == 0 { a } else { Polynomial::one(self.n) };
        }
        let seq = self.remainders(a, b, k, false);
        let last = seq.last().expect("nonempty").clone();
        if last.uses_var(k) {
            Self::shrink(last, k)
        } else {
            Polynomial::one(self.n)
        }
    }

    /// Cached generic subresultant sequence of `a, b` in `x_k`.
    fn generic_prs(&self, a: &Polynomial, b: &Polynomial, k: usize) -> Rc<Vec<PrsStep>> {
        let key = (a.clone(), b.clone(), k);
        if let Some(v) = self.prs.borrow().get(&key) {
            return v.clone();
        }
        let v = Rc::new(subresultant_prs(a, b, k));
        self.prs.borrow_mut().insert(key, v.clone());
        v
    }

    /// The remainder sequence over the point of `a, b`, both with leading
    /// coefficients nonzero there and `deg a >= deg b >= 1`. It stops at the
    /// last member not vanishing identically. With `signed`, member `i` is a
    /// positive multiple at the point of the Sturm-style remainder
    /// `s_i = -rem(s_{i-2}, s_{i-1})`.
    ///
    /// The generic subresultant sequence is specialized while its leading
    /// coefficients survive; from the first degree drop on, remainders are
    /// computed over the point directly.
    fn remainders(&mut self, a: Polynomial, b: Polynomial, k: usize, signed: bool) -> Vec<Polynomial> {
        let steps = self.generic_prs(&a, &b, k);
        let mut generic = vec![a.clone(), b.clone()];
        let mut seq = vec![a, b];
        let mut eps = vec![1i32, 1];
        let mut exact = true;
        for (i, step) in steps.iter().enumerate() {
            if self.out_of_time() {
                return seq;
            }
            let cur = i + 1;
            let e = if signed {
                let delta = generic[cur - 1].degree_measure(k) - generic[cur].degree_measure(k);
                let lc = self.sign(&generic[cur].lc_in(k));
                let beta = self.sign(&step.divisor);
                let lc_pow = if (delta + 1) % 2 == 0 { 1 } else { lc };
                -eps[cur - 1] * beta * lc_pow
            } else {
                1
            };
            let next = self.reduce(step.next.clone());
            let t = self.truncate(&next, k);
            if t.is_zero() || (!t.uses_var(k) && self.sign(&t) == 0) {
                return seq;
            }
            let generic_deg = step.next.degree_measure(k);
            let t = if e < 0 { -t } else { t };
            generic.push(step.next.clone());
            eps.push(e);
            let dropped = t.degree_measure(k) < generic_deg;
            seq.push(t);
            if dropped {
                exact = false;
                break;
            }
        }
        if exact {
            return seq;
        }
        loop {
            let (a, b) = (&seq[seq.len() - 2], &seq[seq.len() - 1]);
            if !b.uses_var(k) || self.out_of_time() {
                return seq;
            }
            let delta = a.degree_measure(k) - b.degree_measure(k);
            let (a, b) = (a.clone(), b.clone());
            let r = RecPoly::new(&a, k).prem(&RecPoly::new(&b, k)).to_poly();
            let next = if signed {
                let lc_sign = self.sign(&b.lc_in(k));
                if lc_sign > 0 || delta % 2 == 1 {
                    -r
                } else {
                    r
                }
            } else {
                r
            };
            let next = self.reduce(next);
            let next = Self::shrink_signed(self.truncate(&next, k), k, self, signed);
            if next.is_zero() || (!next.uses_var(k) && self.sign(&next) == 0) {
                return seq;
            }
            seq.push(next);
        }
    }

    /// Remove the content in `x_k`, keeping the sign at the point when asked.
    fn shrink_signed(p: Polynomial, k: usize, pt: &mut Self, signed: bool) -> Polynomial {
        if !p.uses_var(k) {
            return p.primitive();
        }
        let c = p.content_in(k);
        if c.is_constant() {
            return p.primitive();
        }
        let q = p.div_exact(&c).expect("content divides").primitive();
        if signed && pt.sign(&c) < 0 {
            -q
        } else {
            q
        }
    }

    /// Halve the interval of coordinate `k`.
    fn refine(&mut self, k: usize) {
        let (f, lo, hi, slo) = match &self.coords[k] {
            Coord::Rat(_) => return,
            Coord::Alg { f, lo, hi, slo } => (f.clone(), lo.clone(), hi.clone(), *slo),
        };
        let mid = (&lo + &hi) * half();
        let s = self.sign(&f.substitute(k, &mid));
        self.coords[k] = if s == 0 {
            Coord::Rat(mid)
        } else if s == slo {
            Coord::Alg { f, lo: mid, hi, slo }
        } else {
            Coord::Alg { f, lo, hi: mid, slo }
        };
    }

    /// Refine a candidate next coordinate over this point.
    pub fn refine_next(&mut self, c: &mut Coord) {
        let k = self.len();
        self.push(c.clone());
        self.refine(k);
        *c = self.pop().unwrap();
    }

    /// Distinct real roots in the next variable of `polys`, ascending.
    /// Polynomials vanishing identically over the point contribute nothing.
    pub fn stack_roots(&mut self, polys: &[Polynomial]) -> Vec<Coord> {
        self.stack_roots_tagged(polys).roots
    }

    /// As [`Point::stack_roots`], also reporting which inputs vanish where.
    pub fn stack_roots_tagged(&mut self, polys: &[Polynomial]) -> TaggedRoots {
        let k = self.len();
        if self.all_rational() {
            return self.rational_stack(polys, k);
        }
        let mut roots = Vec::new();
        let mut nullified = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            let p = self.subst(p);
            let p = self.reduce(p);
            let p = self.truncate(&p, k);
            if !p.uses_var(k) {
                if self.sign(&p) == 0 {
                    nullified.push(i);
                }
                continue;
            }
            if self.out_of_time() {
                continue;
            }
            let q = self.squarefree_k(&p, k);
            roots.extend(self.isolate_k(&q, k).into_iter().map(|c| (c, vec![i])));
        }
        let (roots, tags) = self.merge(roots).into_iter().unzip();
        TaggedRoots { roots, tags, nullified }
    }

    fn rational_stack(&mut self, polys: &[Polynomial], k: usize) -> TaggedRoots {
        let mut merged: Vec<(AlgebraicNumber, Vec<usize>)> = Vec::new();
        let mut nullified = Vec::new();
        for (i, p) in polys.iter().enumerate() {
            let p = self.subst(p);
            if p.is_zero() {
                nullified.push(i);
            }
            if !p.uses_var(k) {
                continue;
            }
            let u = UPoly::from_poly(&p, k).expect("only the next variable remains");
            for mut r in u.isolate().expect("nonzero") {
                let mut pos = merged.len();
                for (j, (o, tag)) in merged.iter_mut().enumerate() {
                    match r.compare(o) {
                        std::cmp::Ordering::Less => {
                            pos = j;
                            break;
                        }
                        std::cmp::Ordering::Equal => {
                            tag.push(i);
                            pos = usize::MAX;
                            break;
                        }
                        std::cmp::Ordering::Greater => {}
                    }
                }
                if pos != usize::MAX {
                    merged.insert(pos, (r, vec![i]));
                }
            }
        }
        let (roots, tags) = merged
            .into_iter()
            .map(|(a, tag)| {
                let c = match a.as_rational() {
                    Some(r) => Coord::Rat(r.clone()),
                    None => {
                        let f = a.poly().to_poly(self.n, k);
                        let slo = a.poly().sign_at(a.lo());
                        Coord::Alg { f, lo: a.lo().clone(), hi: a.hi().clone(), slo }
                    }
                };
                (c, tag)
            })
            .unzip();
        TaggedRoots { roots, tags, nullified }
    }

    fn squarefree_k(&mut self, p: &Polynomial, k: usize) -> Polynomial {
        let g = self.gcd_k(p, &p.derivative(k), k);
        if !g.uses_var(k) {
            return Self::shrink(p.clone(), k);
        }
        let (q, _) = RecPoly::new(p, k).pseudo_divide(&RecPoly::new(&g, k));
        let q = self.reduce(q.to_poly());
        let q = self.truncate(&q, k);
        Self::shrink(q, k)
    }

    fn sturm_k(&mut self, q: &Polynomial, k: usize) -> Vec<Polynomial> {
        let d = self.truncate(&q.derivative(k), k).primitive();
        if !d.uses_var(k) {
            return vec![q.clone(), d];
        }
        self.remainders(q.clone(), d, k, true)
    }

    fn variations(&mut self, seq: &[Polynomial], k: usize, x: &BigRational) -> usize {
        let signs: Vec<i32> = seq.iter().map(|s| self.sign(&s.substitute(k, x))).collect();
        let mut last = 0;
        let mut n = 0;
        for s in signs.into_iter().filter(|&s| s != 0) {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
        n
    }

    /// Interval of `p` at the point, refined until it excludes zero.
    fn nonzero_interval(&mut self, p: &Polynomial) -> RatInterval {
        let p = self.subst(p);
        loop {
            let iv = enclose(&p, &self.boxes());
            if matches!(iv.sign(), Some(s) if s != 0) || self.out_of_time() {
                return iv;
            }
            for v in p.vars_used() {
                self.refine(v);
            }
        }
    }

    fn isolate_k(&mut self, q: &Polynomial, k: usize) -> Vec<Coord> {
        let seq = self.sturm_k(q, k);
        let coeffs = q.coeffs_in(k);
        let lc = self.nonzero_interval(coeffs.last().unwrap());
        if self.expired {
            return Vec::new();
        }
        let lc_min = lc.lo.abs().min(lc.hi.abs());
        let mut m = BigRational::zero();
        let q_sub = self.subst(q);
        // a loose integer box keeps this bound cheap
        let coarse: Vec<RatInterval> =
            self.boxes().into_iter().map(|b| RatInterval::new(b.lo.floor(), b.hi.ceil())).collect();
        for c in q_sub.coeffs_in(k).iter().rev().skip(1) {
            let a = enclose(c, &coarse).abs_max();
            if a > m {
                m = a;
            }
        }
        let bound = BigRational::one() + (m / lc_min).ceil();
        let mut out = Vec::new();
        let mut work = vec![(-bound.clone(), bound)];
        while let Some((a, b)) = work.pop() {
            if self.out_of_time() {
                break;
            }
            let count = self.variations(&seq, k, &a) - self.variations(&seq, k, &b);
            if count == 0 {
                continue;
            }
            if count == 1 {
                let slo = self.sign(&q.substitute(k, &a));
                out.push(Coord::Alg { f: q.clone(), lo: a, hi: b, slo });
                continue;
            }
            let w = &b - &a;
            let mut mid = (&a + &b) * half();
            let mut t = BigRational::new(1.into(), 3.into());
            while self.sign(&q.substitute(k, &mid)) == 0 && !self.expired {
                mid = &a + &w * &t;
                t = &t * half();
            }
            work.push((mid.clone(), b));
            work.push((a, mid));
        }
        out
    }

    /// Exact equality of two candidate next coordinates.
    fn same(&mut self, a: &mut Coord, b: &mut Coord) -> bool {
        if let (Coord::Rat(x), Coord::Rat(y)) = (&*a, &*b) {
            return x == y;
        }
        // test the rational one, if any, against the algebraic one
        let (a, b) = if b.is_rational() { (b, a) } else { (a, b) };
        let Coord::Alg { f: fb, .. } = b.clone() else { unreachable!() };
        self.push(a.clone());
        let on = self.sign(&fb) == 0;
        *a = self.pop().unwrap();
        if !on {
            return false;
        }
        loop {
            if self.out_of_time() {
                return false;
            }
            let (bl, bh) = (b.lower().clone(), b.upper().clone());
            if a.lower() >= &bl && a.upper() <= &bh && !(a.is_rational() && (a.lower() == &bl || a.lower() == &bh)) {
                return true;
            }
            if a.upper() <= &bl || a.lower() >= &bh {
                return false;
            }
            self.refine_next(a);
        }
    }

    fn overlap(a: &Coord, b: &Coord) -> bool {
        match (a, b) {
            (Coord::Rat(x), Coord::Rat(y)) => x == y,
            _ => a.gap(b).is_none() && b.gap(a).is_none(),
        }
    }

    /// Sort, drop duplicates and separate the intervals of candidate roots,
    /// uniting the tags of duplicates.
    fn merge(&mut self, mut roots: Vec<(Coord, Vec<usize>)>) -> Vec<(Coord, Vec<usize>)> {
        loop {
            roots.sort_by(|(a, _), (b, _)| a.lower().cmp(b.lower()).then(a.upper().cmp(b.upper())));
            let hit = (0..roots.len().saturating_sub(1)).find(|&i| Self::overlap(&roots[i].0, &roots[i + 1].0));
            let Some(i) = hit else { return roots };
            if self.out_of_time() {
                return roots;
            }
            let (mut a, mut b) = (roots[i].0.clone(), roots[i + 1].0.clone());
            // distinct roots usually separate after a few bisections
            for _ in 0..6 {
                if !Self::overlap(&a, &b) {
                    break;
                }
                self.refine_next(&mut a);
                self.refine_next(&mut b);
            }
            if !Self::overlap(&a, &b) {
                roots[i].0 = a;
                roots[i + 1].0 = b;
                continue;
            }
            if self.same(&mut a, &mut b) {
                let (_, tb) = roots.remove(i + 1);
                roots[i].0 = a;
                roots[i].1.extend(tb);
            } else {
                while Self::overlap(&a, &b) && !self.out_of_time() {
                    self.refine_next(&mut a);
                    self.refine_next(&mut b);
                }
                roots[i].0 = a;
                roots[i + 1].0 = b;
            }
        }
    }

    /// A rational sample in each sector cut by ascending `roots`, refining
    /// the roots as needed.
    pub fn sector_samples(&mut self, roots: &mut [Coord]) -> Vec<BigRational> {
        if roots.is_empty() {
            return vec![BigRational::zero()];
        }
        let mut out = vec![roots[0].below()];
        for i in 1..roots.len() {
            loop {
                if let Some(s) = roots[i - 1].gap(&roots[i]) {
                    out.push(s);
                    break;
                }
                if self.out_of_time() {
                    out.push(roots[i - 1].upper().clone());
                    break;
                }
                let (l, r) = roots.split_at_mut(i);
                self.refine_next(&mut l[i - 1]);
                self.refine_next(&mut r[0]);
            }
        }
        out.push(roots.last().unwrap().above());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_polynomial, VariableOrder};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn xyz(s: &str) -> Polynomial {
        parse_polynomial(s, &VariableOrder::new(["x", "y", "z"]).unwrap()).unwrap()
    }

    fn sqrt2() -> Coord {
        Coord::Alg { f: xyz("x^2-2"), lo: q(1, 1), hi: q(2, 1), slo: -1 }
    }

    #[test]
    fn merge_keeps_tags_with_their_roots() {
        // 2^(1/4) ~ 1.1892 and 1.19 still overlap after the cheap bisections
        let mut p = Point::new(3);
        p.push(sqrt2());
        let alg = Coord::Alg { f: xyz("y^2-x"), lo: q(1, 1), hi: q(2, 1), slo: -1 };
        let out = p.merge(vec![(alg, vec![0]), (Coord::Rat(q(119, 100)), vec![1])]);
        assert_eq!(out.len(), 2);
        for (c, tag) in &out {
            assert_eq!(c.is_rational(), tag == &vec![1], "{c:?} tagged {tag:?}");
        }
    }

    #[test]
    fn tags_match_exact_signs() {
        let polys = [xyz("(y^2-x)*(y-1)"), xyz("y-1"), xyz("y^2-x"), xyz("1000000*y-1189207"), xyz("(x^2-2)*y")];
        let mut p = Point::new(3);
        p.push(sqrt2());
        let t = p.stack_roots_tagged(&polys);
        assert_eq!(t.roots.len(), 4);
        assert_eq!(t.nullified, vec![4]);
        for (root, tag) in t.roots.iter().zip(&t.tags) {
            let mut fresh = Point::from_coords(3, vec![sqrt2(), root.clone()]);
            for (i, f) in polys.iter().enumerate() {
                assert_eq!(fresh.sign(f) == 0, tag.contains(&i) || t.nullified.contains(&i), "poly {i} at {}", root.to_f64());
            }
        }
    }

    #[test]
    fn signs_over_sqrt2() {
        let mut p = Point::new(3);
        p.push(sqrt2());
        assert_eq!(p.sign(&xyz("x^2-2")), 0);
        assert_eq!(p.sign(&xyz("x-1")), 1);
        assert_eq!(p.sign(&xyz("x^4-4")), 0);
        assert_eq!(p.sign(&xyz("10*x-14")), 1);
        assert_eq!(p.sign(&xyz("1000*x-1415")), -1);
    }

    #[test]
    fn tower_zero_test() {
        // y = sqrt(x) over x = sqrt 2, so y^4 = 2
        let mut p = Point::new(3);
        p.push(sqrt2());
        let roots = p.stack_roots(&[xyz("y^2-x")]);
        assert_eq!(roots.len(), 2);
        p.push(roots[1].clone());
        assert_eq!(p.sign(&xyz("y^4-2")), 0);
        assert_eq!(p.sign(&xyz("y^2-x")), 0);
        assert_eq!(p.sign(&xyz("y-x")), -1);
        assert_eq!(p.sign(&xyz("y*x-2*y")), -1);
        assert_eq!(p.sign(&xyz("x*y^2-2")), 0);
    }

    #[test]
    fn stacks_over_an_algebraic_point() {
        let mut p = Point::new(3);
        p.push(sqrt2());
        // circle x^2+y^2=3 meets x = sqrt 2 at y = +-1
        let mut r = p.stack_roots(&[xyz("x^2+y^2-3"), xyz("y-x+1"), xyz("(x^2-2)*y + y - 1")]);
        // y = +-1, y = sqrt2 - 1, y = 1 (shared)
        assert_eq!(r.len(), 3);
        let s = p.sector_samples(&mut r);
        assert_eq!(s.len(), 4);
        for w in s.windows(2) {
            assert!(w[0] < w[1]);
        }
        // vanishing leading coefficient: (x^2-2) y^2 + y degenerates to y = 0
        let r = p.stack_roots(&[xyz("(x^2-2)*y^2 + y")]);
        assert_eq!(r.len(), 1);
        p.push(r[0].clone());
        assert_eq!(p.sign(&xyz("y")), 0);
        p.pop();
        // identically zero over the point
        assert!(p.stack_roots(&[xyz("(x^2-2)*y")]).is_empty());
    }

    #[test]
    fn rational_prefix() {
        let mut p = Point::new(3);
        p.push(Coord::Rat(q(1, 2)));
        let r = p.stack_roots(&[xyz("x^2+y^2-1")]);
        assert_eq!(r.len(), 2);
        p.push(r[1].clone());
        assert_eq!(p.sign(&xyz("4*y^2-3")), 0);
        assert_eq!(p.sign(&xyz("y")), 1);
    }
}
