use num_bigint::BigInt;
use num_traits::Zero;

use super::Polynomial;

/// A polynomial viewed as univariate in `var`, coefficients free of `var`.
/// Coefficients are stored lowest power first with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecPoly {
    nvars: usize,
    var: usize,
    coeffs: Vec<Polynomial>,
}

impl RecPoly {
    pub fn new(p: &Polynomial, var: usize) -> Self {
        Self { nvars: p.nvars(), var, coeffs: p.coeffs_in(var) }
    }

    pub fn from_coeffs(nvars: usize, var: usize, mut coeffs: Vec<Polynomial>) -> Self {
        while coeffs.last().is_some_and(Polynomial::is_zero) {
            coeffs.pop();
        }
        Self { nvars, var, coeffs }
    }

    pub fn constant(nvars: usize, var: usize, c: Polynomial) -> Self {
        Self::from_coeffs(nvars, var, vec![c])
    }

    pub fn var(&self) -> usize {
        self.var
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree in `var`; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Polynomial {
        self.coeffs.get(k).cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    pub fn lc(&self) -> Polynomial {
        self.coeffs.last().cloned().unwrap_or_else(|| Polynomial::zero(self.nvars))
    }

    pub fn to_poly(&self) -> Polynomial {
        Polynomial::from_coeffs_in(self.nvars, self.var, &self.coeffs)
    }

    /// Drop the leading coefficient.
    pub fn reductum(&self) -> RecPoly {
        let mut c = self.coeffs.clone();
        c.pop();
        Self::from_coeffs(self.nvars, self.var, c)
    }

    pub fn derivative(&self) -> RecPoly {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c.scale(&BigInt::from(k)))
            .collect();
        Self::from_coeffs(self.nvars, self.var, c)
    }

    pub fn scale(&self, c: &Polynomial) -> RecPoly {
        Self::from_coeffs(self.nvars, self.var, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn neg(&self) -> RecPoly {
        Self { nvars: self.nvars, var: self.var, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn div_coeffs(&self, c: &Polynomial) -> RecPoly {
        Self::from_coeffs(
            self.nvars,
            self.var,
            self.coeffs.iter().map(|x| x.div_exact(c).expect("exact coefficient division")).collect(),
        )
    }

    /// Integer content of all coefficients removed.
    pub fn primitive_int(&self) -> RecPoly {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, &c.content()));
        if g.is_zero() || g == BigInt::from(1) {
            return self.clone();
        }
        Self::from_coeffs(self.nvars, self.var, self.coeffs.iter().map(|c| c.div_exact(&Polynomial::constant(self.nvars, g.clone())).unwrap()).collect())
    }

    /// Pseudo-division: returns `(q, r)` with `lc(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn pseudo_divide(&self, b: &RecPoly) -> (RecPoly, RecPoly) {
        assert!(!b.is_zero(), "pseudo-division by zero");
        let n = b.degree();
        if self.is_zero() || self.degree() < n {
            return (Self::from_coeffs(self.nvars, self.var, vec![]), self.clone());
        }
        let m = self.degree();
        let lb = b.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![Polynomial::zero(self.nvars); m - n + 1];
        let mut steps = 0u32;
        let mut k = m;
        loop {
            // r has degree <= k
            if k < n {
                break;
            }
            let lr = r[k].clone();
            // r = lb * r - lr * x^(k-n) * b
            for c in r.iter_mut() {
                *c = &*c * &lb;
            }
            for c in q.iter_mut() {
                *c = &*c * &lb;
            }
            if !lr.is_zero() {
                for (j, bc) in b.coeffs.iter().enumerate() {
                    let t = &lr * bc;
                    r[j + k - n] = &r[j + k - n] - &t;
                }
                q[k - n] = &q[k - n] + &lr;
            }
            steps += 1;
            debug_assert!(r[k].is_zero());
            r.pop();
            if k == 0 {
                break;
            }
            k -= 1;
        }
        let e = (m - n + 1) as u32;
        debug_assert_eq!(steps, e);
        (
            Self::from_coeffs(self.nvars, self.var, q),
            Self::from_coeffs(self.nvars, self.var, r),
        )
    }

    pub fn prem(&self, b: &RecPoly) -> RecPoly {
        self.pseudo_divide(b).1
    }

    /// Substitute a polynomial for `var` (Horner).
    pub fn eval_at(&self, x: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::zero(self.nvars);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }
}
