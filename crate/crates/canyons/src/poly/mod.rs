//! Bivariate polynomials over `Scalar`: parsing, derivatives, resultants,
//! tangent cones and the admissibility checks for germ analysis.

mod parse;
mod resultant;
mod univar;
mod zgcd;

pub use parse::{parse_poly, parse_scalar_expr};
pub use resultant::resultant_x;
pub use univar::UnivarPoly;
pub use zgcd::{squarefree_parts_x, XPoly};

use crate::config::Options;
use crate::error::{Error, Result};
use crate::ratio::Q;
use crate::scalar::Scalar;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Exponent pair ordered graded-lexicographically (total degree, then x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expo {
    pub x: u32,
    pub y: u32,
}

impl Ord for Expo {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Graded lexicographic with x > y: ascending total degree, then
        // descending x within a grade (so x^2 prints before x*y).
        (self.x + self.y)
            .cmp(&(other.x + other.y))
            .then_with(|| other.x.cmp(&self.x))
    }
}

impl PartialOrd for Expo {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse bivariate polynomial; no stored zero coefficients, deterministic
/// graded-lex term order.
#[derive(Debug, Clone, Default)]
pub struct BivarPoly {
    terms: BTreeMap<Expo, Scalar>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Scalar) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn var_x() -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, Scalar::one());
        p
    }

    pub fn var_y() -> Self {
        let mut p = Self::zero();
        p.add_term(0, 1, Scalar::one());
        p
    }

    /// Add `c * x^i y^j`, dropping the slot if it cancels exactly.
    pub fn add_term(&mut self, i: u32, j: u32, c: Scalar) {
        if c.is_exact_zero() {
            return;
        }
        let key = Expo { x: i, y: j };
        let entry = match self.terms.remove(&key) {
            Some(prev) => prev.add(&c),
            None => c,
        };
        if !entry.is_exact_zero() {
            self.terms.insert(key, entry);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Expo, &Scalar)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Scalar {
        self.terms
            .get(&Expo { x: i, y: j })
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.x).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.y).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.x + e.y).max()
    }

    /// Minimal total degree among the terms (the multiplicity at the origin).
    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.x + e.y).min()
    }

    pub fn neg(&self) -> Self {
        BivarPoly {
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e.x, e.y, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                out.add_term(a.x + b.x, a.y + b.y, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_scalar(&self, k: &Scalar) -> Self {
        if k.is_exact_zero() {
            return Self::zero();
        }
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            out.add_term(e.x, e.y, c.mul(k));
        }
        out
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut acc = Self::constant(Scalar::one());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn partial_x(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            if e.x > 0 {
                out.add_term(e.x - 1, e.y, c.mul(&Scalar::from_int(e.x as i64)));
            }
        }
        out
    }

    pub fn partial_y(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            if e.y > 0 {
                out.add_term(e.x, e.y - 1, c.mul(&Scalar::from_int(e.y as i64)));
            }
        }
        out
    }

    /// Both formal partials `(f_x, f_y)`.
    pub fn partials(&self) -> (Self, Self) {
        (self.partial_x(), self.partial_y())
    }

    /// Coefficients of `x^i` as polynomials in `y`, index = x-degree.
    pub fn collect_x(&self) -> Vec<UnivarPoly> {
        let dx = match self.deg_x() {
            Some(d) => d as usize,
            None => return Vec::new(),
        };
        let mut cols: Vec<Vec<Scalar>> = vec![Vec::new(); dx + 1];
        for (e, c) in self.terms() {
            let col = &mut cols[e.x as usize];
            if col.len() <= e.y as usize {
                col.resize(e.y as usize + 1, Scalar::zero());
            }
            col[e.y as usize] = c.clone();
        }
        cols.into_iter().map(UnivarPoly::from_coeffs).collect()
    }

    /// The homogeneous part of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms() {
            if e.x + e.y == d {
                out.add_term(e.x, e.y, c.clone());
            }
        }
        out
    }

    pub fn vanishes_at_origin(&self) -> bool {
        self.coeff(0, 0).is_exact_zero()
    }

    /// `f(c x, c y)`: every degree-`d` term picks up `c^d`.
    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        let mut out = Self::zero();
        for (e, coeff) in self.terms() {
            let factor = c.pow_i64((e.x + e.y) as i64)?;
            out.add_term(e.x, e.y, coeff.mul(&factor));
        }
        Ok(out)
    }

    /// `f(x + λ y, y)`, expanded exactly.
    pub fn shear(&self, lambda: &Scalar) -> Self {
        let x_shifted = {
            let mut p = Self::var_x();
            p.add_term(0, 1, lambda.clone());
            p
        };
        let mut out = Self::zero();
        for (e, coeff) in self.terms() {
            let xpow = x_shifted.pow(e.x);
            for (xe, xc) in xpow.terms() {
                out.add_term(xe.x, xe.y + e.y, coeff.mul(xc));
            }
        }
        out
    }
}

/// Initial form data: multiplicity `k`, the dehomogenization
/// `h(λ) = H_k(λ, 1)`, and the cone lines with multiplicities.
#[derive(Debug, Clone)]
pub struct TangentCone {
    pub k: u32,
    pub h: UnivarPoly,
    /// Roots λ of `h` with cone multiplicities; the line is `x = λ y`.
    pub lines: Vec<(Scalar, u32)>,
}

impl TangentCone {
    /// Lines of the singular locus of the cone: repeated lines only.
    pub fn sigma_lines(&self) -> Vec<Scalar> {
        self.lines
            .iter()
            .filter(|(_, m)| *m >= 2)
            .map(|(l, _)| l.clone())
            .collect()
    }
}

/// Initial form, its dehomogenization, and the cone lines.
pub fn tangent_cone(f: &BivarPoly, opts: &Options) -> Result<TangentCone> {
    if f.is_zero() || !f.vanishes_at_origin() {
        return Err(Error::NotVanishingAtOrigin);
    }
    let k = f.min_total_degree().unwrap();
    let init = f.homogeneous_part(k);
    // h(λ) = H_k(λ, 1): coefficient of x^i y^(k-i) becomes coefficient of λ^i.
    let mut coeffs = vec![Scalar::zero(); k as usize + 1];
    for (e, c) in init.terms() {
        coeffs[e.x as usize] = c.clone();
    }
    let h = UnivarPoly::from_coeffs(coeffs);
    let mut lines = h.roots(opts.precision, &opts.eps())?;
    lines.sort_by(|a, b| a.0.canonical_cmp(&b.0));
    Ok(TangentCone { k, h, lines })
}

/// Mini-regularity in `x`: the coefficient of `x^k` in the initial form is
/// nonzero.
pub fn mini_regular_check(f: &BivarPoly) -> Result<bool> {
    if f.is_zero() || !f.vanishes_at_origin() {
        return Err(Error::NotVanishingAtOrigin);
    }
    let k = f.min_total_degree().unwrap();
    Ok(!f.coeff(k, 0).is_exact_zero())
}

/// No repeated branch through the origin, detected via
/// `Res_x(f, ∂f/∂x) != 0` (sound for polynomial inputs).
pub fn squarefree_check(f: &BivarPoly) -> Result<bool> {
    let fx = f.partial_x();
    if f.deg_x().unwrap_or(0) < 1 || fx.deg_x().is_none() {
        // x-degree < 2: f = a(y) + b(y) x; a repeated branch needs deg >= 2.
        return Ok(true);
    }
    let res = resultant_x(f, &fx)?;
    Ok(!res.is_zero())
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let (sign, body) = match c.exact_parts() {
                Some((re, im)) if im.is_zero() && re.is_negative() => {
                    ("-", format_coeff(&c.neg(), e))
                }
                _ => ("+", format_coeff(c, e)),
            };
            if first {
                if sign == "-" {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else {
                write!(f, " {sign} {body}")?;
            }
        }
        Ok(())
    }
}

fn format_coeff(c: &Scalar, e: Expo) -> String {
    let mono = match (e.x, e.y) {
        (0, 0) => String::new(),
        (1, 0) => "x".into(),
        (0, 1) => "y".into(),
        (i, 0) => format!("x^{i}"),
        (0, j) => format!("y^{j}"),
        (1, 1) => "x*y".into(),
        (1, j) => format!("x*y^{j}"),
        (i, 1) => format!("x^{i}*y"),
        (i, j) => format!("x^{i}*y^{j}"),
    };
    let is_one = c.eq_exact(&Scalar::one());
    let needs_parens = c.exact_parts().map_or(true, |(re, im)| {
        !im.is_zero() && !re.is_zero()
    });
    match (is_one, mono.is_empty()) {
        (true, false) => mono,
        (_, true) => c.to_display_string(),
        _ if needs_parens => format!("({})*{}", c.to_display_string(), mono),
        _ => format!("{}*{}", c.to_display_string(), mono),
    }
}

/// Evaluate `f` along `x = 0`: the univariate `f(0, y)`.
pub fn restrict_x0(f: &BivarPoly) -> UnivarPoly {
    let mut coeffs = Vec::new();
    for (e, c) in f.terms() {
        if e.x == 0 {
            if coeffs.len() <= e.y as usize {
                coeffs.resize(e.y as usize + 1, Scalar::zero());
            }
            coeffs[e.y as usize] = c.clone();
        }
    }
    UnivarPoly::from_coeffs(coeffs)
}

/// Order in `y` of a univariate polynomial, as a rational (None for zero).
pub fn ord_y(p: &UnivarPoly) -> Option<Q> {
    p.order().map(|o| Q::from_integer((o as u64).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::qi;

    fn opts() -> Options {
        Options::default()
    }

    fn poly(text: &str) -> BivarPoly {
        parse_poly(text, &Default::default()).unwrap()
    }

    #[test]
    fn partials_of_example_family() {
        // x^3 - 3x y^10 + y^12 at t = 1
        let f = poly("x^3 - 3*x*y^10 + y^12");
        let (fx, fy) = f.partials();
        assert_eq!(fx.to_string(), "3*x^2 - 3*y^10");
        assert_eq!(fy.to_string(), "-30*x*y^9 + 12*y^11");
    }

    #[test]
    fn partials_of_constant_vanish() {
        let c = BivarPoly::constant(Scalar::from_int(5));
        let (fx, fy) = c.partials();
        assert!(fx.is_zero() && fy.is_zero());
    }

    #[test]
    fn partials_commute() {
        let f = poly("x^3 + x^2*y^3 + y^9 + x*y^7");
        let (fx, _) = f.partials();
        assert_eq!(fx.to_string(), "3*x^2 + 2*x*y^3 + y^7");
        let xy = f.partial_x().partial_y();
        let yx = f.partial_y().partial_x();
        assert_eq!(xy.to_string(), yx.to_string());
    }

    #[test]
    fn tangent_cone_cusp_family() {
        let f = poly("x^3 - 3*x*y^10 + y^12");
        let cone = tangent_cone(&f, &opts()).unwrap();
        assert_eq!(cone.k, 3);
        assert_eq!(cone.lines.len(), 1);
        assert!(cone.lines[0].0.eq_exact(&Scalar::zero()));
        assert_eq!(cone.lines[0].1, 3);
        assert_eq!(cone.sigma_lines().len(), 1);
    }

    #[test]
    fn tangent_cone_squarefree_cone() {
        let f = poly("x^2 - y^2");
        let cone = tangent_cone(&f, &opts()).unwrap();
        assert_eq!(cone.k, 2);
        let lambdas: Vec<_> = cone.lines.iter().map(|(l, m)| (l.clone(), *m)).collect();
        assert_eq!(lambdas.len(), 2);
        assert!(lambdas.iter().all(|(_, m)| *m == 1));
        assert!(lambdas.iter().any(|(l, _)| l.eq_exact(&Scalar::from_int(1))));
        assert!(lambdas.iter().any(|(l, _)| l.eq_exact(&Scalar::from_int(-1))));
        assert!(cone.sigma_lines().is_empty());
    }

    #[test]
    fn mini_regularity() {
        assert!(mini_regular_check(&poly("x^3 - 3*x*y^10 + y^12")).unwrap());
        assert!(!mini_regular_check(&poly("y^2 + x^3")).unwrap());
        assert!(mini_regular_check(&poly("x^3 + x^2*y^3 + y^9 + x*y^7")).unwrap());
    }

    #[test]
    fn squarefree_detection() {
        // (x - y)^2 expanded
        assert!(!squarefree_check(&poly("x^2 - 2*x*y + y^2")).unwrap());
        assert!(squarefree_check(&poly("x^3 - 3*x*y^10 + y^12")).unwrap());
        assert!(squarefree_check(&poly("x^2 - y^3")).unwrap());
    }

    #[test]
    fn scale_and_shear_are_exact() {
        let f = poly("x^2 - y^2");
        let sheared = f.shear(&Scalar::one());
        assert_eq!(sheared.to_string(), "x^2 + 2*x*y");
        let scaled = f.scale(&Scalar::from_int(2)).unwrap();
        assert_eq!(scaled.to_string(), "4*x^2 - 4*y^2");
        let identity = f.shear(&Scalar::zero());
        assert_eq!(identity.to_string(), f.to_string());
    }

    #[test]
    fn display_matches_input_style() {
        let f = poly("x^3 - 3*x*y^10 + y^12");
        assert_eq!(f.to_string(), "x^3 - 3*x*y^10 + y^12");
        assert_eq!(poly("0*x + y - y").to_string(), "0");
        let g = poly("i*x^2 - 2*y");
        assert_eq!(g.to_string(), "-2*y + i*x^2");
        let _ = qi(0);
    }
}
