//! Dense univariate polynomials over `Scalar`, exact coefficient field ℚ(i).
//!
//! Used for the `y`-coefficients of bivariate polynomials (Sylvester
//! entries), tangent-cone dehomogenizations, and Newton-polygon edge
//! polynomials.

use crate::error::{Error, Result};
use crate::scalar::roots;
use crate::scalar::Scalar;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct UnivarPoly {
    /// Coefficient of `t^i` at index `i`; no trailing zeros.
    pub coeffs: Vec<Scalar>,
}

impl UnivarPoly {
    pub fn zero() -> Self {
        UnivarPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        UnivarPoly { coeffs: vec![c] }.trimmed()
    }

    pub fn from_coeffs(coeffs: Vec<Scalar>) -> Self {
        UnivarPoly { coeffs }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, Scalar::is_exact_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Order at t = 0: index of the first nonzero coefficient.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_exact_zero())
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn neg(&self) -> Self {
        UnivarPoly {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&rhs.coeff(i)));
        }
        UnivarPoly { coeffs: out }.trimmed()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UnivarPoly { coeffs: out }.trimmed()
    }

    pub fn mul_scalar(&self, k: &Scalar) -> Self {
        UnivarPoly {
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
        .trimmed()
    }

    pub fn derivative(&self) -> Self {
        UnivarPoly {
            coeffs: roots::derivative_exact(&self.coeffs),
        }
        .trimmed()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Euclidean division over ℚ(i); coefficients must be exact.
    pub fn divrem(&self, rhs: &Self) -> Result<(Self, Self)> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if !self.coeffs.iter().chain(&rhs.coeffs).all(Scalar::is_exact) {
            return Err(Error::Internal(
                "polynomial division requires exact coefficients".into(),
            ));
        }
        let (q, r) = roots::divrem_exact(&self.coeffs, &rhs.coeffs);
        Ok((UnivarPoly { coeffs: q }, UnivarPoly { coeffs: r }))
    }

    /// Exact quotient; error if the division leaves a remainder.
    pub fn div_exact(&self, rhs: &Self) -> Result<Self> {
        let (q, r) = self.divrem(rhs)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn gcd(&self, rhs: &Self) -> Self {
        UnivarPoly {
            coeffs: roots::gcd_exact(&self.coeffs, &rhs.coeffs),
        }
    }

    /// Roots with multiplicity (delegates to the scalar root finder).
    pub fn roots(&self, prec: u32, eps: &crate::ratio::Q) -> Result<Vec<(Scalar, u32)>> {
        roots::univariate_roots(&self.coeffs, prec, eps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q;

    fn p(coeffs: &[i64]) -> UnivarPoly {
        UnivarPoly::from_coeffs(coeffs.iter().map(|&c| Scalar::from_int(c)).collect())
    }

    #[test]
    fn ring_ops() {
        let a = p(&[1, 2]); // 1 + 2t
        let b = p(&[-1, 1]); // t - 1
        assert_eq!(a.mul(&b).coeffs.len(), 3); // -1 + ... + 2t^2
        assert!(a.mul(&b).coeff(0).eq_exact(&Scalar::from_int(-1)));
        assert!(a.add(&b).coeff(1).eq_exact(&Scalar::from_int(3)));
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[2, -3, 0, 1]); // (t-1)^2 (t+2)
        let b = p(&[-1, 1]);
        let (quo, rem) = a.divrem(&b).unwrap();
        assert!(rem.is_zero());
        assert_eq!(quo.degree(), Some(2));
        let g = a.gcd(&a.derivative());
        // gcd = t - 1 (monic)
        assert_eq!(g.degree(), Some(1));
        assert!(g.coeff(0).eq_exact(&Scalar::from_int(-1)));
        assert!(g.coeff(1).eq_exact(&Scalar::one()));
    }

    #[test]
    fn evaluation() {
        let a = p(&[1, 0, 3]); // 1 + 3t^2
        let v = a.eval(&Scalar::from_q(q(1, 2)));
        assert!(v.eq_exact(&Scalar::from_q(q(7, 4))));
    }
}
