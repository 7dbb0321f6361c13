//! Rational exponents and the extended line used for orders and windows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;

/// Exponents, orders, degrees: exact rationals everywhere.
pub type Q = BigRational;

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Rational extended with `+∞`, ordered with `Inf` greatest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XRat {
    Fin(Q),
    Inf,
}

impl XRat {
    pub fn fin(q: Q) -> Self {
        XRat::Fin(q)
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, XRat::Inf)
    }

    pub fn as_fin(&self) -> Option<&Q> {
        match self {
            XRat::Fin(q) => Some(q),
            XRat::Inf => None,
        }
    }

    pub fn min_with(self, other: XRat) -> XRat {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// `self + q`, absorbing into `Inf`.
    pub fn add_q(&self, rhs: &Q) -> XRat {
        match self {
            XRat::Fin(a) => XRat::Fin(a + rhs),
            XRat::Inf => XRat::Inf,
        }
    }
}

impl PartialOrd for XRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (XRat::Inf, XRat::Inf) => Ordering::Equal,
            (XRat::Inf, _) => Ordering::Greater,
            (_, XRat::Inf) => Ordering::Less,
            (XRat::Fin(a), XRat::Fin(b)) => a.cmp(b),
        }
    }
}

impl From<Q> for XRat {
    fn from(q: Q) -> Self {
        XRat::Fin(q)
    }
}

impl fmt::Display for XRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XRat::Fin(q) => write!(f, "{}", fmt_q(q)),
            XRat::Inf => write!(f, "inf"),
        }
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse `"p"` or `"p/q"` (optional leading minus).
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n.trim().parse().ok()?;
        let den: BigInt = d.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(Q::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(Q::from_integer(num))
    }
}

/// lcm of the denominators of a family of rationals, as `u32`.
pub fn lcm_denoms<'a, I: IntoIterator<Item = &'a Q>>(items: I) -> Option<u32> {
    let mut acc = BigInt::one();
    for q in items {
        acc = acc.lcm(q.denom());
    }
    acc.to_u32()
}

/// Floor of a nonnegative rational as usize (None if negative or too large).
pub fn floor_usize(q: &Q) -> Option<usize> {
    if q.is_negative() {
        return None;
    }
    q.to_integer().to_usize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xrat_ordering() {
        assert!(XRat::Inf > XRat::fin(qi(1_000_000)));
        assert!(XRat::fin(q(3, 2)) < XRat::fin(qi(2)));
        assert_eq!(XRat::Inf.min_with(XRat::fin(qi(5))), XRat::fin(qi(5)));
        assert_eq!(XRat::Inf.add_q(&qi(7)), XRat::Inf);
    }

    #[test]
    fn format_and_parse() {
        assert_eq!(fmt_q(&q(9, 2)), "9/2");
        assert_eq!(fmt_q(&qi(-4)), "-4");
        assert_eq!(parse_q("15/3"), Some(qi(5)));
        assert_eq!(parse_q("-7/2"), Some(q(-7, 2)));
        assert_eq!(parse_q("2/0"), None);
    }

    #[test]
    fn lcm_of_denominators() {
        let xs = [q(1, 2), q(5, 3), qi(4)];
        assert_eq!(lcm_denoms(xs.iter()), Some(6));
    }
}
