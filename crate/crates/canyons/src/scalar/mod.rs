//! Coefficient arithmetic: exact Gaussian rationals with a transparent
//! fallback to arbitrary-precision complex balls.
//!
//! Exact values never silently degrade: arithmetic on two `Exact` values is
//! `Exact`; a mixed operation promotes the exact side at the ball's
//! precision.

mod ball;
mod bigfloat;
pub mod roots;

pub use ball::Ball;
pub use bigfloat::BigFloat;

use crate::error::{Error, Result};
use crate::ratio::{fmt_q, parse_q, Q};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(Q, Q),
    Approx(Ball),
}

/// Tri-state outcome of a zero test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    NonZero,
    Unknown,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Q::zero(), Q::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Q::one(), Q::zero())
    }

    pub fn i() -> Self {
        Scalar::Exact(Q::zero(), Q::one())
    }

    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(Q::from_integer(BigInt::from(v)), Q::zero())
    }

    pub fn from_q(v: Q) -> Self {
        Scalar::Exact(v, Q::zero())
    }

    pub fn from_q_pair(re: Q, im: Q) -> Self {
        Scalar::Exact(re, im)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(..))
    }

    /// Structural zero: exact 0, or a ball with zero center and radius.
    pub fn is_exact_zero(&self) -> bool {
        match self {
            Scalar::Exact(a, b) => a.is_zero() && b.is_zero(),
            Scalar::Approx(b) => b.re.is_zero() && b.im.is_zero() && b.err.is_zero(),
        }
    }

    pub fn exact_parts(&self) -> Option<(&Q, &Q)> {
        match self {
            Scalar::Exact(a, b) => Some((a, b)),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_ball(&self, prec: u32) -> Ball {
        match self {
            Scalar::Exact(a, b) => Ball::from_rationals(a, b, prec),
            Scalar::Approx(b) => b.clone(),
        }
    }

    pub fn to_f64(&self) -> Complex64 {
        match self {
            Scalar::Exact(a, b) => Complex64::new(
                a.to_f64().unwrap_or(f64::NAN),
                b.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Approx(b) => b.to_f64(),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            Scalar::Exact(a, b) => Scalar::Exact(-a.clone(), -b.clone()),
            Scalar::Approx(b) => Scalar::Approx(b.neg()),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Scalar::Exact(a, b) => Scalar::Exact(a.clone(), -b.clone()),
            Scalar::Approx(b) => Scalar::Approx(b.conj()),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Scalar::Exact(a, b), Scalar::Exact(c, d)) => Scalar::Exact(a + c, b + d),
            _ => {
                let p = self.prec().max(rhs.prec());
                Scalar::Approx(self.to_ball(p).add(&rhs.to_ball(p)))
            }
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        match (self, rhs) {
            (Scalar::Exact(a, b), Scalar::Exact(c, d)) => {
                Scalar::Exact(a * c - b * d, a * d + b * c)
            }
            _ => {
                let p = self.prec().max(rhs.prec());
                Scalar::Approx(self.to_ball(p).mul(&rhs.to_ball(p)))
            }
        }
    }

    /// Scale by an exact rational (stays exact for exact inputs).
    pub fn mul_q(&self, k: &Q) -> Self {
        match self {
            Scalar::Exact(a, b) => Scalar::Exact(a * k, b * k),
            Scalar::Approx(b) => {
                let p = b.prec;
                Scalar::Approx(b.mul(&Ball::from_rationals(k, &Q::zero(), p)))
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        match self {
            Scalar::Exact(a, b) => {
                let n = a * a + b * b;
                if n.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                Ok(Scalar::Exact(a / &n, -(b / &n)))
            }
            Scalar::Approx(b) => Ok(Scalar::Approx(b.inv()?)),
        }
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow_i64(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inv()?.pow_i64(-n);
        }
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Principal branch of `self^(p/q)`: exact for integer exponents, ball
    /// otherwise (the principal `q`-th root raised to `p`).
    pub fn pow_q(&self, e: &Q, prec: u32) -> Result<Self> {
        if e.denom().is_one() {
            let p = e
                .numer()
                .to_i64()
                .ok_or_else(|| Error::Internal("exponent overflow".into()))?;
            return self.pow_i64(p);
        }
        let den = e
            .denom()
            .to_u32()
            .ok_or_else(|| Error::Internal("exponent denominator overflow".into()))?;
        let num = e
            .numer()
            .to_i64()
            .ok_or_else(|| Error::Internal("exponent overflow".into()))?;
        let ball = self.to_ball(prec);
        let root = ball
            .kth_roots(den)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Internal("empty root set".into()))?;
        Scalar::Approx(root).pow_i64(num)
    }

    fn prec(&self) -> u32 {
        match self {
            Scalar::Exact(..) => 0,
            Scalar::Approx(b) => b.prec,
        }
    }

    /// Tri-state zero test. Exact values decide unconditionally; approximate
    /// values compare the center magnitude against `err + eps` / `eps - err`.
    pub fn zero_test(&self, eps: &Q) -> ZeroTest {
        match self {
            Scalar::Exact(a, b) => {
                if a.is_zero() && b.is_zero() {
                    ZeroTest::Zero
                } else {
                    ZeroTest::NonZero
                }
            }
            Scalar::Approx(ball) => {
                let center_sq = ball.center_abs_sq();
                let err = ball.err_rational();
                let hi = (&err + eps) * (&err + eps);
                if center_sq > hi {
                    return ZeroTest::NonZero;
                }
                if &err <= eps {
                    let room = eps - &err;
                    if center_sq <= &room * &room {
                        return ZeroTest::Zero;
                    }
                }
                ZeroTest::Unknown
            }
        }
    }

    /// Rational bounds `(lo, hi)` with `lo <= |value| <= hi`.
    pub fn abs_bounds_q(&self) -> (Q, Q) {
        match self {
            Scalar::Exact(a, b) => {
                let sq = a * a + b * b;
                bracket_sqrt(&sq)
            }
            Scalar::Approx(ball) => {
                let lo = ball.abs_low().to_rational() - ball.err_rational();
                let hi = ball.abs_up().to_rational() + ball.err_rational();
                (if lo.is_negative() { Q::zero() } else { lo }, hi)
            }
        }
    }

    /// Exact squared magnitude when both parts are exact.
    pub fn abs_sq_exact(&self) -> Option<Q> {
        let (a, b) = self.exact_parts()?;
        Some(a * a + b * b)
    }

    /// True when `|self - rhs| <= tol` is certain; false when certainly not;
    /// `None` when the radii straddle the tolerance. Exact pairs are decided
    /// by exact squared comparison.
    pub fn within(&self, rhs: &Self, tol: &Q) -> Option<bool> {
        let diff = self.sub(rhs);
        if let Some(sq) = diff.abs_sq_exact() {
            return Some(sq <= tol * tol);
        }
        let (lo, hi) = diff.abs_bounds_q();
        if &hi <= tol {
            Some(true)
        } else if &lo > tol {
            Some(false)
        } else {
            None
        }
    }

    /// Exact square root in ℚ(i), when one exists.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        let (a, b) = self.exact_parts()?;
        if b.is_zero() {
            if a.is_negative() {
                let s = rational_sqrt(&-a.clone())?;
                return Some(Scalar::Exact(Q::zero(), s));
            }
            let s = rational_sqrt(a)?;
            return Some(Scalar::Exact(s, Q::zero()));
        }
        let norm_sq = a * a + b * b;
        let r = rational_sqrt(&norm_sq)?;
        let re_sq = (&r + a) / Q::from_integer(2.into());
        let re = rational_sqrt(&re_sq)?;
        if re.is_zero() {
            return None;
        }
        let im = b / (&re * Q::from_integer(2.into()));
        let cand = Scalar::Exact(re, im);
        // Guard against the rare case (a+r)/2 square but b inconsistent.
        if cand.mul(&cand).eq_exact(self) {
            Some(cand)
        } else {
            None
        }
    }

    /// All `k`-th roots. Exact roots are recognized for rational bases (and
    /// upgraded in place of their ball twins); the rest carry radii.
    pub fn kth_roots(&self, k: u32, prec: u32) -> Result<Vec<Scalar>> {
        assert!(k >= 1);
        if k == 1 {
            return Ok(vec![self.clone()]);
        }
        if self.is_exact_zero() {
            return Ok(vec![Scalar::zero()]);
        }
        let mut exact: Vec<Scalar> = Vec::new();
        if let Some((a, b)) = self.exact_parts() {
            if let Some(base) = exact_real_kth_root(a, b, k) {
                for u in exact_unity_roots(k) {
                    let cand = base.mul(&u);
                    if cand.pow_i64(k as i64).unwrap().eq_exact(self) {
                        exact.push(cand);
                    }
                }
            }
        }
        let balls = self.to_ball(prec).kth_roots(k)?;
        let mut out = Vec::with_capacity(k as usize);
        for ball_root in balls {
            let approx = Scalar::Approx(ball_root);
            let upgraded = exact.iter().find(|e| {
                let d = approx.sub(e);
                let (_, hi) = d.abs_bounds_q();
                // Same root iff the ball's center essentially sits on it:
                // root separation is far larger than the radius here.
                hi <= approx_radius_times(&approx, 4)
            });
            out.push(upgraded.cloned().unwrap_or(approx));
        }
        Ok(out)
    }

    /// `e^(2*pi*i*p/k)` as a scalar; exact whenever the reduced order divides 4.
    pub fn unity_root(k: u32, p: i64, prec: u32) -> Result<Scalar> {
        assert!(k >= 1);
        let p = p.rem_euclid(k as i64) as u32;
        let g = num_integer::gcd(p, k);
        let (pr, kr) = (p / g.max(1), k / g.max(1));
        match kr {
            1 => Ok(Scalar::one()),
            2 => Ok(Scalar::from_int(-1)),
            4 => Ok(if pr == 1 { Scalar::i() } else { Scalar::i().neg() }),
            _ => {
                let roots = Scalar::one().to_ball(prec).kth_roots(kr)?;
                Ok(Scalar::Approx(roots[pr as usize].clone()))
            }
        }
    }

    /// Uniformly-flavored exact point on the unit circle, via the rational
    /// parametrization ((1-t^2) + 2t i) / (1+t^2).
    pub fn random_unit<R: RngCore>(rng: &mut R) -> Scalar {
        loop {
            let num = (rng.next_u64() % 4001) as i64 - 2000;
            let den = (rng.next_u64() % 199) as i64 + 1;
            if num == 0 {
                continue;
            }
            let t = Q::new(BigInt::from(num), BigInt::from(den));
            let t2 = &t * &t;
            let denom = Q::one() + &t2;
            let re = (Q::one() - &t2) / &denom;
            let im = (Q::from_integer(2.into()) * &t) / &denom;
            return Scalar::Exact(re, im);
        }
    }

    /// Exact-only equality (false whenever either side is approximate).
    pub fn eq_exact(&self, rhs: &Self) -> bool {
        match (self, rhs) {
            (Scalar::Exact(a, b), Scalar::Exact(c, d)) => a == c && b == d,
            _ => false,
        }
    }

    /// Deterministic ordering for canonical output (not a semantic order).
    pub fn canonical_cmp(&self, rhs: &Self) -> Ordering {
        let (ar, ai) = self.center_rationals();
        let (br, bi) = rhs.center_rationals();
        ar.cmp(&br)
            .then_with(|| ai.cmp(&bi))
            .then_with(|| rhs.is_exact().cmp(&self.is_exact()))
    }

    fn center_rationals(&self) -> (Q, Q) {
        match self {
            Scalar::Exact(a, b) => (a.clone(), b.clone()),
            Scalar::Approx(b) => (b.re.to_rational(), b.im.to_rational()),
        }
    }

    /// Serialization used everywhere: `"p/q+r/s*i"` with zero parts omitted.
    pub fn to_display_string(&self) -> String {
        match self {
            Scalar::Exact(a, b) => format_exact(a, b),
            Scalar::Approx(ball) => format!(
                "~{}{}{}*i",
                ball.re.to_f64(),
                if ball.im.to_f64() >= 0.0 { "+" } else { "" },
                ball.im.to_f64()
            ),
        }
    }
}

fn approx_radius_times(s: &Scalar, k: i64) -> Q {
    match s {
        Scalar::Exact(..) => Q::zero(),
        Scalar::Approx(b) => {
            let e = b.err_rational();
            if e.is_zero() {
                // Zero-radius balls (exact dyadic centers) still deserve a
                // matching window one ulp wide.
                Q::new(BigInt::one(), BigInt::one() << (b.prec as usize))
            } else {
                e * Q::from_integer(BigInt::from(k))
            }
        }
    }
}

/// Rational `sqrt` when the argument is a perfect square.
pub fn rational_sqrt(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    if v.is_zero() {
        return Some(Q::zero());
    }
    let ns = v.numer().sqrt();
    let ds = v.denom().sqrt();
    if &(&ns * &ns) == v.numer() && &(&ds * &ds) == v.denom() {
        Some(Q::new(ns, ds))
    } else {
        None
    }
}

/// Rational `k`-th root when it exists.
pub fn rational_kth_root(v: &Q, k: u32) -> Option<Q> {
    if v.is_zero() {
        return Some(Q::zero());
    }
    if v.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return rational_kth_root(&-v.clone(), k).map(|r| -r);
    }
    let nr = v.numer().nth_root(k);
    let dr = v.denom().nth_root(k);
    if &nr.pow(k) == v.numer() && &dr.pow(k) == v.denom() {
        Some(Q::new(nr, dr))
    } else {
        None
    }
}

/// One exact k-th root of `a + b i` when `b = 0` and the rational case works
/// out (including the odd/even sign and the `i`-twist cases).
fn exact_real_kth_root(a: &Q, b: &Q, k: u32) -> Option<Scalar> {
    if !b.is_zero() {
        return None;
    }
    if let Some(r) = rational_kth_root(a, k) {
        return Some(Scalar::Exact(r, Q::zero()));
    }
    // Negative real with even k: try i * |a|^(1/k) (works when k ≡ 2 mod 4).
    if a.is_negative() && k % 2 == 0 {
        if let Some(r) = rational_kth_root(&-a.clone(), k) {
            return Some(Scalar::Exact(Q::zero(), r));
        }
    }
    None
}

/// The exact k-th roots of unity available in ℚ(i).
fn exact_unity_roots(k: u32) -> Vec<Scalar> {
    let mut out = vec![Scalar::one()];
    if k % 2 == 0 {
        out.push(Scalar::from_int(-1));
    }
    if k % 4 == 0 {
        out.push(Scalar::i());
        out.push(Scalar::i().neg());
    }
    out
}

/// Bracket sqrt(v) between rationals (v >= 0); exact when square.
fn bracket_sqrt(v: &Q) -> (Q, Q) {
    if let Some(s) = rational_sqrt(v) {
        return (s.clone(), s);
    }
    let (f, e) = BigFloat::from_rational(v, 96);
    let under = f.to_rational() - e.to_rational();
    let base = if under.is_negative() { Q::zero() } else { under };
    let (s, se) = BigFloat::from_rational(&base, 96).0.sqrt(96);
    let lo = s.to_rational() - se.to_rational() * Q::from_integer(2.into());
    let over = f.to_rational() + e.to_rational();
    let (s2, se2) = BigFloat::from_rational(&over, 96).0.sqrt(96);
    let hi = s2.to_rational() + se2.to_rational() * Q::from_integer(2.into());
    (if lo.is_negative() { Q::zero() } else { lo }, hi)
}

fn format_exact(a: &Q, b: &Q) -> String {
    if a.is_zero() && b.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    if !a.is_zero() {
        out.push_str(&fmt_q(a));
    }
    if !b.is_zero() {
        if !a.is_zero() && !b.is_negative() {
            out.push('+');
        }
        if b.is_one() {
            out.push('i');
        } else if (-b.clone()).is_one() {
            out.push_str("-i");
        } else {
            out.push_str(&fmt_q(b));
            out.push_str("*i");
        }
    }
    out
}

/// Parse the exact form `"p/q+r/s*i"` (zero parts omitted, `i` coefficient
/// of one abbreviated).
pub fn parse_exact_scalar(s: &str) -> Option<(Q, Q)> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    // Split into the real chunk and the imaginary chunk on a +/- that is not
    // the leading sign.
    let bytes = s.as_bytes();
    let mut split = None;
    for (idx, &ch) in bytes.iter().enumerate().skip(1) {
        if ch == b'+' || ch == b'-' {
            split = Some(idx);
            break;
        }
    }
    let (first, second) = match split {
        Some(idx) => (&s[..idx], &s[idx..]),
        None => (&s[..], ""),
    };
    let parse_imag = |chunk: &str| -> Option<Q> {
        let body = chunk.strip_suffix("*i").or_else(|| chunk.strip_suffix('i'))?;
        match body {
            "" | "+" => Some(Q::one()),
            "-" => Some(-Q::one()),
            other => parse_q(other),
        }
    };
    if second.is_empty() {
        if first.ends_with('i') {
            return Some((Q::zero(), parse_imag(first)?));
        }
        return Some((parse_q(first)?, Q::zero()));
    }
    if !second.ends_with('i') {
        return None;
    }
    Some((parse_q(first)?, parse_imag(second)?))
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Exact(String),
    Approx {
        re: String,
        im: String,
        err: String,
        prec: u32,
    },
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Scalar::Exact(a, b) => ScalarRepr::Exact(format_exact(a, b)),
            Scalar::Approx(ball) => ScalarRepr::Approx {
                re: ball.re.to_decimal_string(),
                im: ball.im.to_decimal_string(),
                err: ball.err.to_decimal_string(),
                prec: ball.prec,
            },
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        match ScalarRepr::deserialize(de)? {
            ScalarRepr::Exact(s) => {
                let (a, b) =
                    parse_exact_scalar(&s).ok_or_else(|| DeError::custom("bad exact scalar"))?;
                Ok(Scalar::Exact(a, b))
            }
            ScalarRepr::Approx { re, im, err, prec } => {
                let (r, re_rnd) = BigFloat::from_decimal_string(&re, prec)
                    .ok_or_else(|| DeError::custom("bad decimal"))?;
                let (i, im_rnd) = BigFloat::from_decimal_string(&im, prec)
                    .ok_or_else(|| DeError::custom("bad decimal"))?;
                let (e, _) = BigFloat::from_decimal_string(&err, prec)
                    .ok_or_else(|| DeError::custom("bad decimal"))?;
                let err = e.add(&re_rnd).add(&im_rnd).round_up_mag();
                Ok(Scalar::Approx(Ball::new(r, i, err, prec)))
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_display_string())
    }
}
