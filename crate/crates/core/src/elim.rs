//! Resultants, discriminants, gcds and square-free parts with respect to one
//! designated variable.

use thiserror::Error;

use crate::poly::{Polynomial, RecPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElimError {
    #[error("no elimination variable: neither polynomial involves the variable")]
    NoEliminationVariable,
    #[error("zero polynomial")]
    ZeroPolynomial,
}

/// `res_v(p, q)` by the subresultant remainder sequence. Agrees with the
/// Sylvester determinant, sign included.
pub fn resultant(p: &Polynomial, q: &Polynomial, v: usize) -> Result<Polynomial, ElimError> {
    if p.is_zero() || q.is_zero() {
        return Err(ElimError::ZeroPolynomial);
    }
    if !p.uses_var(v) && !q.uses_var(v) {
        return Err(ElimError::NoEliminationVariable);
    }
    Ok(subresultant(&RecPoly::new(p, v), &RecPoly::new(q, v)))
}

pub(crate) fn subresultant(a: &RecPoly, b: &RecPoly) -> Polynomial {
    let nvars = a.nvars();
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut s = 1i32;
    if a.degree() < b.degree() {
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.is_zero() {
        return Polynomial::zero(nvars);
    }
    let mut g = Polynomial::one(nvars);
    let mut h = Polynomial::one(nvars);
    while b.degree() > 0 {
        let delta = (a.degree() - b.degree()) as u32;
        if a.degree() % 2 == 1 && b.degree() % 2 == 1 {
            s = -s;
        }
        let r = a.prem(&b);
        a = b;
        let divisor = &g * &h.pow(delta);
        b = r.div_coeffs(&divisor);
        g = a.lc();
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
        if b.is_zero() {
            return Polynomial::zero(nvars);
        }
    }
    let da = a.degree() as u32;
    let res = if da == 0 {
        Polynomial::one(nvars)
    } else {
        b.lc().pow(da).div_exact(&h.pow(da - 1)).expect("subresultant division is exact")
    };
    if s < 0 {
        -res
    } else {
        res
    }
}

/// One step of a subresultant remainder sequence:
/// `next = prem(prev, cur) / divisor`, the division being exact.
#[derive(Debug, Clone)]
pub struct PrsStep {
    pub next: Polynomial,
    pub divisor: Polynomial,
}

/// The subresultant remainder sequence in `v` continuing `a, b`, where
/// `deg a >= deg b >= 1`. Stops before the first zero remainder.
pub fn subresultant_prs(a: &Polynomial, b: &Polynomial, v: usize) -> Vec<PrsStep> {
    let nvars = a.nvars();
    let (mut a, mut b) = (RecPoly::new(a, v), RecPoly::new(b, v));
    assert!(a.degree() >= b.degree() && b.degree() >= 1, "remainder sequence needs deg a >= deg b >= 1");
    let mut g = Polynomial::one(nvars);
    let mut h = Polynomial::one(nvars);
    let mut out = Vec::new();
    while b.degree() > 0 {
        let delta = (a.degree() - b.degree()) as u32;
        let divisor = &g * &h.pow(delta);
        let next = a.prem(&b).div_coeffs(&divisor);
        if next.is_zero() {
            break;
        }
        out.push(PrsStep { next: next.to_poly(), divisor });
        a = b;
        b = next;
        g = a.lc();
        if delta > 0 {
            h = g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact");
        }
    }
    out
}

/// `disc_v(p) = (-1)^(d(d-1)/2) res_v(p, p') / lc_v(p)`; 1 when `p` is linear in `v`.
pub fn discriminant(p: &Polynomial, v: usize) -> Result<Polynomial, ElimError> {
    if p.is_zero() {
        return Err(ElimError::ZeroPolynomial);
    }
    let d = match p.degree_in(v) {
        Some(0) | None => return Err(ElimError::NoEliminationVariable),
        Some(d) => d,
    };
    if d == 1 {
        return Ok(Polynomial::one(p.nvars()));
    }
    let r = resultant(p, &p.derivative(v), v)?;
    let q = r.div_exact(&p.lc_in(v)).expect("leading coefficient divides res(p, p')");
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Greatest common divisor viewing both as univariate in `v`: primitive with
/// positive leading coefficient.
pub fn gcd_univ(p: &Polynomial, q: &Polynomial, v: usize) -> Result<Polynomial, ElimError> {
    if p.is_zero() && q.is_zero() {
        return Err(ElimError::ZeroPolynomial);
    }
    let g = p.gcd(q).primitive();
    Ok(if g.lc_in(v).lex_leading_sign() < 0 { -g } else { g })
}

/// `p / gcd(p, dp/dv)`, primitive with positive leading coefficient.
pub fn squarefree_part(p: &Polynomial, v: usize) -> Result<Polynomial, ElimError> {
    if p.is_zero() {
        return Err(ElimError::ZeroPolynomial);
    }
    Ok(p.squarefree_in(v))
}
