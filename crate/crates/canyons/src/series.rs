//! Truncated fractional-power series in `y` and polynomials in `z` over
//! them: the working representation for Newton-Puiseux shifts
//! `F(A(y) + z, y)`.
//!
//! A series carries a `window`: all exponents strictly below it are complete
//! and certified. Exact finite computations have an infinite window; pruning
//! at a cap lowers it.

use crate::error::{Error, Result};
use crate::poly::BivarPoly;
use crate::ratio::{Q, XRat};
use crate::scalar::{Scalar, ZeroTest};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct FracSeries {
    terms: BTreeMap<Q, Scalar>,
    pub window: XRat,
}

impl FracSeries {
    pub fn zero(window: XRat) -> Self {
        FracSeries { terms: BTreeMap::new(), window }
    }

    pub fn from_terms<I: IntoIterator<Item = (Q, Scalar)>>(items: I, window: XRat) -> Self {
        let mut s = FracSeries::zero(window);
        for (e, c) in items {
            s.add_term(e, c);
        }
        s
    }

    pub fn single(exp: Q, coeff: Scalar) -> Self {
        Self::from_terms([(exp, coeff)], XRat::Inf)
    }

    pub fn constant(coeff: Scalar) -> Self {
        Self::single(Q::zero(), coeff)
    }

    pub fn add_term(&mut self, exp: Q, coeff: Scalar) {
        if coeff.is_exact_zero() {
            return;
        }
        if let XRat::Fin(w) = &self.window {
            if &exp >= w {
                return;
            }
        }
        let entry = match self.terms.remove(&exp) {
            Some(prev) => prev.add(&coeff),
            None => coeff,
        };
        if !entry.is_exact_zero() {
            self.terms.insert(exp, entry);
        }
    }

    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &Scalar)> {
        self.terms.iter()
    }

    pub fn term_vec(&self) -> Vec<(Q, Scalar)> {
        self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect()
    }

    pub fn coeff_at(&self, exp: &Q) -> Scalar {
        self.terms.get(exp).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Formal minimal exponent (ignores possibly-zero approximate leads).
    pub fn min_exp(&self) -> Option<&Q> {
        self.terms.keys().next()
    }

    /// Leading term after certified zero tests: `Ok(None)` means the series
    /// is zero below its window.
    pub fn leading_checked(&self, eps: &Q) -> Result<Option<(Q, Scalar)>> {
        for (e, c) in &self.terms {
            match c.zero_test(eps) {
                ZeroTest::NonZero => return Ok(Some((e.clone(), c.clone()))),
                ZeroTest::Zero => continue,
                ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
            }
        }
        Ok(None)
    }

    /// Certified order in `y`: exponent of the leading term, or the window
    /// when the series is zero below it (`Inf` = identically zero).
    pub fn ord_checked(&self, eps: &Q) -> Result<XRat> {
        match self.leading_checked(eps)? {
            Some((e, _)) => Ok(XRat::Fin(e)),
            None => Ok(self.window.clone()),
        }
    }

    pub fn neg(&self) -> Self {
        FracSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            window: self.window.clone(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let window = self.window.clone().min_with(rhs.window.clone());
        let mut out = FracSeries::zero(window);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul_scalar(&self, k: &Scalar) -> Self {
        if k.is_exact_zero() {
            return FracSeries::zero(self.window.clone());
        }
        FracSeries {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.mul(k)))
                .collect(),
            window: self.window.clone(),
        }
    }

    /// Multiply by `y^e` (shifts exponents and the window).
    pub fn mul_ypow(&self, e: &Q) -> Self {
        FracSeries {
            terms: self
                .terms
                .iter()
                .map(|(exp, c)| (exp + e, c.clone()))
                .collect(),
            window: self.window.add_q(e),
        }
    }

    fn formal_ord(&self) -> XRat {
        match self.min_exp() {
            Some(e) => XRat::Fin(e.clone()),
            None => XRat::Inf,
        }
    }

    pub fn mul(&self, rhs: &Self, cap: &XRat) -> Self {
        // Window calculus: Â·O(y^wb) has order >= ord(Â)+wb, and so on.
        let natural = self
            .window
            .add_xrat(&rhs.formal_ord())
            .min_with(rhs.window.add_xrat(&self.formal_ord()));
        // The cap only costs certification when it actually prunes a term.
        let mut pruned = false;
        let mut out = FracSeries::zero(natural.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea + eb;
                if let XRat::Fin(c) = cap {
                    if &e >= c {
                        pruned = true;
                        continue;
                    }
                }
                out.add_term(e, ca.mul(cb));
            }
        }
        if pruned {
            out.window = natural.min_with(cap.clone());
        }
        out
    }

    pub fn pow_u32(&self, n: u32, cap: &XRat) -> Self {
        let mut acc = FracSeries::constant(Scalar::one());
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, cap);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, cap);
            }
        }
        acc
    }

    pub fn truncate(&self, at: &XRat) -> Self {
        let window = self.window.clone().min_with(at.clone());
        let mut out = FracSeries::zero(window);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    /// Series division `self / rhs` up to `cap`. The divisor's leading term
    /// must pass the zero test.
    pub fn div(&self, rhs: &Self, cap: &XRat, eps: &Q) -> Result<Self> {
        let (e0, c0) = rhs.leading_checked(eps)?.ok_or(Error::DivisionByZero)?;
        let c0_inv = c0.inv()?;
        // rhs = c0 y^e0 (1 + s), ord(s) > 0.
        let mut s = FracSeries::zero(rhs.window.add_q(&-e0.clone()));
        for (e, c) in &rhs.terms {
            if *e == e0 {
                continue;
            }
            s.add_term(e - &e0, c.mul(&c0_inv));
        }
        // Window of the quotient: min(wn - e0, ord(num) + wd - 2 e0, cap).
        let num_ord = self.formal_ord();
        let window = self
            .window
            .add_q(&-e0.clone())
            .min_with(rhs.window.add_q(&-(&e0 + &e0)).add_xrat(&num_ord))
            .min_with(cap.clone());
        // The inverse of (1+s) is needed on a span of window - ord(num) + e0.
        let span = match (&window, &num_ord) {
            (XRat::Fin(w), XRat::Fin(n)) => XRat::Fin(w - n + &e0),
            _ => window.clone(),
        };
        let mut inv = FracSeries::constant(Scalar::one());
        inv.window = span.clone();
        if !s.is_formally_zero() {
            if matches!(span, XRat::Inf) {
                // An honest infinite expansion cannot be materialized.
                return Err(Error::TruncationCapExceeded);
            }
            let s_ord = s.min_exp().cloned().expect("nonempty series");
            if !s_ord.is_positive() {
                return Err(Error::Internal("divisor not in normalized form".into()));
            }
            let mut power = FracSeries::constant(Scalar::one());
            power.window = span.clone();
            loop {
                power = power.mul(&s.neg(), &span);
                if power.is_formally_zero() {
                    break;
                }
                inv = inv.add(&power);
            }
        }
        let mut out = self.mul(&inv, &XRat::Inf).mul_scalar(&c0_inv).mul_ypow(&-e0);
        out.window = window;
        Ok(out.truncate(&out.window.clone()))
    }
}

impl XRat {
    /// Saturating addition on the extended line.
    pub fn add_xrat(&self, rhs: &XRat) -> XRat {
        match (self, rhs) {
            (XRat::Fin(a), XRat::Fin(b)) => XRat::Fin(a + b),
            _ => XRat::Inf,
        }
    }
}

/// Polynomial in `z` with fractional-power-series coefficients.
#[derive(Debug, Clone)]
pub struct FracPoly {
    pub cols: Vec<FracSeries>,
}

impl FracPoly {
    pub fn from_bivar(f: &BivarPoly) -> Self {
        let deg = f.deg_x().map_or(0, |d| d as usize);
        let mut cols = vec![FracSeries::zero(XRat::Inf); deg + 1];
        for (e, c) in f.terms() {
            cols[e.x as usize].add_term(Q::from_integer(BigInt::from(e.y)), c.clone());
        }
        FracPoly { cols }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self
            .cols
            .last()
            .map_or(false, FracSeries::is_formally_zero)
        {
            self.cols.pop();
        }
        self
    }

    pub fn deg_z(&self) -> Option<usize> {
        if self.cols.is_empty() {
            None
        } else {
            Some(self.cols.len() - 1)
        }
    }

    pub fn col(&self, i: usize) -> Option<&FracSeries> {
        self.cols.get(i)
    }

    /// `F(A(y) + z, y)` by binomial expansion; series work capped at `cap`.
    pub fn shift(&self, arc: &[(Q, Scalar)], cap: &XRat) -> Self {
        if arc.is_empty() {
            return self.clone().trimmed();
        }
        let a = FracSeries::from_terms(arc.iter().cloned(), XRat::Inf);
        let deg = self.cols.len().saturating_sub(1);
        let mut apow: Vec<FracSeries> = Vec::with_capacity(deg + 1);
        apow.push(FracSeries::constant(Scalar::one()));
        for _ in 0..deg {
            let next = apow.last().unwrap().mul(&a, cap);
            apow.push(next);
        }
        let mut out = vec![FracSeries::zero(XRat::Inf); self.cols.len()];
        for (i, col) in self.cols.iter().enumerate() {
            if col.is_formally_zero() {
                continue;
            }
            for k in 0..=i {
                // C(i, k) * col * A^(i-k) contributes to z^k.
                let binom = Scalar::from_q(Q::from_integer(binomial(i as u64, k as u64)));
                let contrib = col.mul(&apow[i - k], cap).mul_scalar(&binom);
                out[k] = out[k].add(&contrib);
            }
        }
        FracPoly { cols: out }.trimmed()
    }

    /// Evaluate `F(A(y), y)` by Horner in `z`.
    pub fn eval_at(&self, arc: &[(Q, Scalar)], cap: &XRat) -> FracSeries {
        let a = FracSeries::from_terms(arc.iter().cloned(), XRat::Inf);
        let mut acc = FracSeries::zero(XRat::Inf);
        for col in self.cols.iter().rev() {
            acc = acc.mul(&a, cap).add(col);
        }
        acc
    }

    /// Strip `z^m` content: columns certified zero from the bottom up.
    pub fn strip_z_content(&self, eps: &Q) -> Result<(usize, FracPoly)> {
        let mut m = 0;
        for col in &self.cols {
            if col.leading_checked(eps)?.is_none() {
                if matches!(col.window, XRat::Fin(_)) {
                    // A finite window cannot certify an identically-zero
                    // column; refuse rather than guess.
                    return Err(Error::TruncationCapExceeded);
                }
                m += 1;
            } else {
                break;
            }
        }
        Ok((m, FracPoly { cols: self.cols[m..].to_vec() }.trimmed()))
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k.min(n));
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..k {
        num *= BigInt::from(n - t);
        den *= BigInt::from(t + 1);
    }
    num / den
}
