//! Squarefree decomposition in `x` over ℚ(i)[y], via primitive
//! pseudo-remainder sequences. Keeps Puiseux expansion terminating on inputs
//! whose `x`-discriminant vanishes identically.

use super::univar::UnivarPoly;
use super::BivarPoly;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Polynomial in `x` with ℚ(i)[y] coefficients; index = x-degree.
#[derive(Debug, Clone)]
pub struct XPoly {
    pub coeffs: Vec<UnivarPoly>,
}

impl XPoly {
    pub fn from_bivar(f: &BivarPoly) -> Self {
        XPoly { coeffs: f.collect_x() }.trimmed()
    }

    pub fn to_bivar(&self) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            for (j, s) in c.coeffs.iter().enumerate() {
                out.add_term(i as u32, j as u32, s.clone());
            }
        }
        out
    }

    fn trimmed(mut self) -> Self {
        while self.coeffs.last().map_or(false, UnivarPoly::is_zero) {
            self.coeffs.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    fn lc(&self) -> &UnivarPoly {
        self.coeffs.last().expect("nonzero polynomial")
    }

    fn mul_coeff(&self, k: &UnivarPoly) -> Self {
        XPoly {
            coeffs: self.coeffs.iter().map(|c| c.mul(k)).collect(),
        }
        .trimmed()
    }

    fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        let zero = UnivarPoly::zero();
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = rhs.coeffs.get(i).unwrap_or(&zero);
            out.push(a.sub(b));
        }
        XPoly { coeffs: out }.trimmed()
    }

    fn shift_mul(&self, k: &UnivarPoly, power: usize) -> Self {
        let mut coeffs = vec![UnivarPoly::zero(); power];
        coeffs.extend(self.coeffs.iter().map(|c| c.mul(k)));
        XPoly { coeffs }.trimmed()
    }

    pub fn derivative_x(&self) -> Self {
        XPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.mul_scalar(&Scalar::from_int(i as i64)))
                .collect(),
        }
        .trimmed()
    }

    /// gcd in ℚ(i)[y] of all coefficients (monic).
    fn content(&self) -> UnivarPoly {
        let mut acc = UnivarPoly::zero();
        for c in &self.coeffs {
            acc = acc.gcd(c);
            if acc.degree() == Some(0) {
                break;
            }
        }
        acc
    }

    fn primitive(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let content = self.content();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c.div_exact(&content)?);
        }
        let mut p = XPoly { coeffs: out }.trimmed();
        // Unit normalization: leading coefficient of the leading y-poly = 1.
        let unit = p.lc().coeffs.last().cloned().unwrap_or_else(Scalar::one);
        let inv = unit.inv().map_err(|_| Error::Internal("zero unit".into()))?;
        p = p.mul_coeff(&UnivarPoly::constant(inv));
        Ok(p)
    }

    /// Pseudo-remainder of `self` by `rhs` (deg rhs <= deg self).
    fn pseudo_rem(&self, rhs: &Self) -> Self {
        let db = rhs.deg().expect("nonzero divisor");
        let mut r = self.clone();
        let lead = rhs.lc().clone();
        while let Some(dr) = r.deg() {
            if dr < db {
                break;
            }
            let top = r.lc().clone();
            r = r.mul_coeff(&lead).sub(&rhs.shift_mul(&top, dr - db));
        }
        r
    }

    /// Primitive gcd in ℚ(i)[y][x].
    pub fn gcd(&self, rhs: &Self) -> Result<Self> {
        let mut a = self.primitive()?;
        let mut b = rhs.primitive()?;
        if a.is_zero() {
            return Ok(b);
        }
        if b.is_zero() {
            return Ok(a);
        }
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        let mut guard = 0;
        while !b.is_zero() {
            if b.deg() == Some(0) {
                // Coprime in x.
                return XPoly { coeffs: vec![UnivarPoly::constant(Scalar::one())] }.primitive();
            }
            let r = a.pseudo_rem(&b).primitive()?;
            a = b;
            b = r;
            guard += 1;
            if guard > 4096 {
                return Err(Error::Internal("PRS did not terminate".into()));
            }
        }
        a.primitive()
    }

    /// Exact quotient in ℚ(i)[y][x]; errors if the division is not exact.
    pub fn div_exact(&self, rhs: &Self) -> Result<Self> {
        let db = rhs.deg().ok_or(Error::DivisionByZero)?;
        let mut r = self.clone();
        let mut q = vec![UnivarPoly::zero(); self.coeffs.len().saturating_sub(db)];
        while let Some(dr) = r.deg() {
            if dr < db {
                break;
            }
            let c = r.lc().div_exact(rhs.lc())?;
            q[dr - db] = c.clone();
            r = r.sub(&rhs.shift_mul(&c, dr - db));
        }
        if !r.is_zero() {
            return Err(Error::Internal("inexact bivariate division".into()));
        }
        Ok(XPoly { coeffs: q }.trimmed())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return XPoly { coeffs: Vec::new() };
        }
        let mut out = vec![UnivarPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        XPoly { coeffs: out }.trimmed()
    }
}

/// Squarefree multiplicity split of `f` in `x` (Musser's algorithm): returns
/// `(s_i, i)` pairs with each `s_i` squarefree in `x` and
/// `f = unit * content(y) * prod s_i^i`. The `y`-content carries no `x`-roots
/// and is dropped.
pub fn squarefree_parts_x(f: &BivarPoly) -> Result<Vec<(BivarPoly, u32)>> {
    let p = XPoly::from_bivar(f);
    if p.deg().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let p = p.primitive()?;
    let dp = p.derivative_x();
    let mut g = p.gcd(&dp)?;
    if g.deg() == Some(0) {
        return Ok(vec![(p.to_bivar(), 1)]);
    }
    let mut w = p.div_exact(&g)?;
    let mut out = Vec::new();
    let mut i = 1u32;
    while w.deg().unwrap_or(0) > 0 {
        let y = w.gcd(&g)?;
        let fac = w.div_exact(&y)?;
        if fac.deg().unwrap_or(0) > 0 {
            out.push((fac.to_bivar(), i));
        }
        g = g.div_exact(&y)?;
        w = y;
        i += 1;
        if i > 256 {
            return Err(Error::Internal("squarefree split ran away".into()));
        }
    }
    Ok(out)
}
