//! Dyadic arbitrary-precision floats: `man * 2^exp` with `man: BigInt`.
//!
//! Addition and multiplication are exact; rounding happens only where a
//! precision is requested (`round`, `div`, `sqrt`) and every rounding op
//! reports an upper bound on the error it introduced, so callers can keep a
//! sound error radius.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat {
    man: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        BigFloat { man: BigInt::one(), exp: 0 }
    }

    pub fn from_bigint(man: BigInt) -> Self {
        BigFloat { man, exp: 0 }.normalized()
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_bigint(BigInt::from(v))
    }

    /// Exact: every finite f64 is dyadic.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "non-finite f64");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), biased - 1075)
        };
        BigFloat { man: BigInt::from(sign) * BigInt::from(man), exp }.normalized()
    }

    /// Power of two `2^e`.
    pub fn pow2(e: i64) -> Self {
        BigFloat { man: BigInt::one(), exp: e }
    }

    fn normalized(mut self) -> Self {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Exponent of the most significant bit: value lies in `[2^(e-1), 2^e)`.
    pub fn msb_exp(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.exp + self.man.bits() as i64)
        }
    }

    pub fn neg(&self) -> Self {
        BigFloat { man: -self.man.clone(), exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigFloat { man: self.man.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        BigFloat { man: self.man.clone(), exp: self.exp + e }
    }

    /// Exact addition.
    pub fn add(&self, rhs: &Self) -> Self {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(rhs.exp);
        let a = &self.man << (self.exp - exp) as usize;
        let b = &rhs.man << (rhs.exp - exp) as usize;
        BigFloat { man: a + b, exp }.normalized()
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Exact multiplication.
    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        BigFloat { man: &self.man * &rhs.man, exp: self.exp + rhs.exp }.normalized()
    }

    /// Round to `prec` mantissa bits (toward zero). Returns the rounded value
    /// and an upper bound on `|self - rounded|` (zero when exact).
    pub fn round(&self, prec: u32) -> (Self, Self) {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return (self.clone(), Self::zero());
        }
        let shift = (bits - prec as u64) as usize;
        let man = &self.man >> shift;
        let rounded = BigFloat { man, exp: self.exp + shift as i64 }.normalized();
        let ulp = BigFloat::pow2(self.exp + shift as i64);
        (rounded, ulp)
    }

    /// `self / rhs` to `prec` bits. Returns quotient and error bound.
    pub fn div(&self, rhs: &Self, prec: u32) -> (Self, Self) {
        assert!(!rhs.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        // Scale the numerator so the integer quotient carries prec+2 bits.
        let num_bits = self.man.bits() as i64;
        let den_bits = rhs.man.bits() as i64;
        let shift = (den_bits - num_bits + prec as i64 + 2).max(0) as usize;
        let scaled = &self.man << shift;
        let q = &scaled / &rhs.man;
        let exp = self.exp - rhs.exp - shift as i64;
        let quotient = BigFloat { man: q, exp }.normalized();
        // Truncated integer division: error below one unit of the result grid.
        let err = BigFloat::pow2(exp);
        (quotient, err)
    }

    /// Square root of a nonnegative value to `prec` bits, with error bound.
    pub fn sqrt(&self, prec: u32) -> (Self, Self) {
        assert!(!self.is_negative(), "BigFloat sqrt of negative value");
        if self.is_zero() {
            return (Self::zero(), Self::zero());
        }
        // Scale so the mantissa has >= 2*prec+2 bits and an even exponent.
        let bits = self.man.bits() as i64;
        let mut shift = (2 * prec as i64 + 2 - bits).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let scaled = &self.man << shift as usize;
        let root = scaled.sqrt();
        let exp = (self.exp - shift) / 2;
        let value = BigFloat { man: root, exp }.normalized();
        let err = BigFloat::pow2(exp);
        (value, err)
    }

    /// Round an error bound upward to a small mantissa (soundness: result >= self).
    pub fn round_up_mag(&self) -> Self {
        debug_assert!(!self.is_negative());
        let bits = self.man.bits();
        const MAG_BITS: u64 = 24;
        if bits <= MAG_BITS {
            return self.clone();
        }
        let shift = (bits - MAG_BITS) as usize;
        let man = (&self.man >> shift) + BigInt::one();
        BigFloat { man, exp: self.exp + shift as i64 }.normalized()
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as usize)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Nearest dyadic at `prec` bits, with error bound. Exact when the
    /// denominator is a power of two that fits the budget.
    pub fn from_rational(q: &BigRational, prec: u32) -> (Self, Self) {
        if q.is_zero() {
            return (Self::zero(), Self::zero());
        }
        let num = q.numer();
        let den = q.denom();
        if let Some(tz) = exact_pow2(den) {
            let cand = BigFloat { man: num.clone(), exp: -(tz as i64) }.normalized();
            if cand.bits() <= prec as u64 + 8 {
                return (cand, Self::zero());
            }
        }
        let num_bits = num.bits() as i64;
        let den_bits = den.bits() as i64;
        let shift = (den_bits - num_bits + prec as i64 + 2).max(0) as usize;
        let man = (num << shift) / den;
        let exp = -(shift as i64);
        (BigFloat { man, exp }.normalized(), BigFloat::pow2(exp))
    }

    pub fn to_f64(&self) -> f64 {
        // Good enough for seeds and display; saturates on overflow.
        let bits = self.man.bits();
        if bits == 0 {
            return 0.0;
        }
        if bits > 53 {
            let shift = (bits - 53) as usize;
            let top = (&self.man >> shift).to_i64().expect("53-bit mantissa") as f64;
            top * 2f64.powi((self.exp + shift as i64).clamp(-2000, 2000) as i32)
        } else {
            let m = self.man.to_i64().expect("small mantissa") as f64;
            m * 2f64.powi(self.exp.clamp(-2000, 2000) as i32)
        }
    }

    /// Exact decimal representation (finite for every dyadic).
    pub fn to_decimal_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.exp >= 0 {
            return (&self.man << self.exp as usize).to_string();
        }
        let k = (-self.exp) as usize;
        // man / 2^k = man * 5^k / 10^k
        let scaled = &self.man * BigInt::from(5u32).pow(k as u32);
        let neg = scaled.is_negative();
        let digits = scaled.abs().to_string();
        let (int_part, frac_part) = if digits.len() > k {
            let split = digits.len() - k;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), format!("{:0>width$}", digits, width = k))
        };
        let frac_part = frac_part.trim_end_matches('0');
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&int_part);
        if !frac_part.is_empty() {
            out.push('.');
            out.push_str(frac_part);
        }
        out
    }

    /// Parse a decimal string; exact when the fraction is dyadic (which holds
    /// for every string produced by `to_decimal_string`).
    pub fn from_decimal_string(s: &str, prec: u32) -> Option<(Self, Self)> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((a, b)) => (a, b),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits = format!(
            "{}{}",
            if int_part.is_empty() { "0" } else { int_part },
            frac_part
        );
        let num: BigInt = digits.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac_part.len() as u32);
        let q = BigRational::new(num, den);
        Some(Self::from_rational(&q, prec))
    }
}

/// If `n == 2^k`, return `k`.
fn exact_pow2(n: &BigInt) -> Option<u64> {
    if n.sign() != Sign::Plus {
        return None;
    }
    let tz = n.trailing_zeros()?;
    if n.bits() == tz + 1 {
        Some(tz)
    } else {
        None
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        let sa = self.man.sign();
        let sb = other.man.sign();
        if sa != sb {
            return match (sa, sb) {
                (Sign::Minus, _) => Ordering::Less,
                (_, Sign::Minus) => Ordering::Greater,
                (Sign::NoSign, Sign::Plus) => Ordering::Less,
                (Sign::Plus, Sign::NoSign) => Ordering::Greater,
                _ => Ordering::Equal,
            };
        }
        if sa == Sign::NoSign {
            return Ordering::Equal;
        }
        // Same nonzero sign: compare magnitude exponents first.
        let ma = self.msb_exp().unwrap();
        let mb = other.msb_exp().unwrap();
        let mag_order = if ma != mb {
            ma.cmp(&mb)
        } else {
            let exp = self.exp.min(other.exp);
            let a = &self.man << (self.exp - exp) as usize;
            let b = &other.man << (other.exp - exp) as usize;
            return a.cmp(&b);
        };
        if sa == Sign::Minus {
            mag_order.reverse()
        } else {
            mag_order
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({} * 2^{} ~ {})", self.man, self.exp, self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::q;
    use num_traits::Signed;

    #[test]
    fn exact_ring_ops() {
        let a = BigFloat::from_f64(1.5);
        let b = BigFloat::from_f64(2.25);
        assert_eq!(a.add(&b).to_f64(), 3.75);
        assert_eq!(a.mul(&b).to_f64(), 3.375);
        assert_eq!(a.sub(&b).to_f64(), -0.75);
    }

    #[test]
    fn division_error_is_bounded() {
        let a = BigFloat::from_i64(1);
        let b = BigFloat::from_i64(3);
        let (v, e) = a.div(&b, 128);
        let third = q(1, 3);
        let diff = (v.to_rational() - third).abs();
        assert!(diff <= e.to_rational());
        assert!(e.to_rational() < q(1, 1_000_000_000));
    }

    #[test]
    fn sqrt_error_is_bounded() {
        let a = BigFloat::from_i64(2);
        let (v, e) = a.sqrt(128);
        let r = v.to_rational();
        let resid = (r.clone() * r - q(2, 1)).abs();
        // |v^2 - 2| <= (2v + e) * e, comfortably below 2^-120.
        let bound = (v.to_rational() * q(2, 1) + e.to_rational()) * e.to_rational();
        assert!(resid <= bound);
    }

    #[test]
    fn ordering_across_exponents() {
        let a = BigFloat::from_f64(0.7);
        let b = BigFloat::from_i64(3).mul_pow2(-2); // 0.75
        assert!(a < b);
        assert!(b.neg() < a);
        assert_eq!(BigFloat::zero().cmp(&BigFloat::zero()), Ordering::Equal);
    }

    #[test]
    fn decimal_round_trip_is_exact() {
        let v = BigFloat::from_f64(-3.0 / 1024.0).add(&BigFloat::from_i64(7));
        let s = v.to_decimal_string();
        let (back, err) = BigFloat::from_decimal_string(&s, 256).unwrap();
        assert!(err.is_zero());
        assert_eq!(back, v);
    }

    #[test]
    fn rational_conversion_round_trip() {
        let r = q(-22, 7);
        let (v, e) = BigFloat::from_rational(&r, 200);
        assert!((v.to_rational() - r).abs() <= e.to_rational());
        let dy = q(5, 8);
        let (v2, e2) = BigFloat::from_rational(&dy, 64);
        assert!(e2.is_zero());
        assert_eq!(v2.to_rational(), dy);
    }
}
