//! Resultant with respect to `x` via fraction-free Bareiss elimination on the
//! Sylvester matrix, staying in ℚ(i)[y] throughout.

use super::univar::UnivarPoly;
use super::BivarPoly;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `Res_x(f, g)` as a polynomial in `y`. Sign follows the Sylvester
/// determinant with the `f` rows on top: `Res_x(x^2 - y, x) = -y`.
pub fn resultant_x(f: &BivarPoly, g: &BivarPoly) -> Result<UnivarPoly> {
    let df = f.deg_x().filter(|d| *d >= 1).ok_or_else(|| {
        Error::PreconditionNotMet("resultant needs deg_x(f) >= 1".into())
    })? as usize;
    let dg = g.deg_x().filter(|d| *d >= 1).ok_or_else(|| {
        Error::PreconditionNotMet("resultant needs deg_x(g) >= 1".into())
    })? as usize;
    let fc = f.collect_x();
    let gc = g.collect_x();
    let n = df + dg;
    let zero = UnivarPoly::zero;
    let mut m: Vec<Vec<UnivarPoly>> = vec![vec![zero(); n]; n];
    // dg rows of f coefficients, descending powers, then df rows of g.
    for r in 0..dg {
        for (k, c) in fc.iter().enumerate() {
            m[r][r + df - k] = c.clone();
        }
    }
    for r in 0..df {
        for (k, c) in gc.iter().enumerate() {
            m[dg + r][r + dg - k] = c.clone();
        }
    }
    bareiss_det(m)
}

/// Fraction-free determinant of a matrix over ℚ(i)[y].
fn bareiss_det(mut m: Vec<Vec<UnivarPoly>>) -> Result<UnivarPoly> {
    let n = m.len();
    if n == 0 {
        return Ok(UnivarPoly::constant(Scalar::one()));
    }
    let mut sign = false;
    let mut prev = UnivarPoly::constant(Scalar::one());
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(UnivarPoly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev)?;
            }
            m[i][k] = UnivarPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::poly::ord_y;
    use crate::ratio::qi;

    fn poly(text: &str) -> BivarPoly {
        parse_poly(text, &Default::default()).unwrap()
    }

    #[test]
    fn sylvester_sign_convention() {
        // Res_x(x^2 - y, x) = -y under the f-rows-on-top convention.
        let r = resultant_x(&poly("x^2 - y"), &poly("x")).unwrap();
        assert_eq!(r.degree(), Some(1));
        assert!(r.coeff(1).eq_exact(&Scalar::from_int(-1)));
        assert!(r.coeff(0).is_exact_zero());
    }

    #[test]
    fn order_of_discriminant_cusp_family() {
        let f = poly("x^3 - 3*x*y^10 + y^12");
        let fx = poly("3*x^2 - 3*y^10");
        let r = resultant_x(&f, &fx).unwrap();
        assert_eq!(ord_y(&r), Some(qi(24)));
        // 27 * (y^24 - 4 y^30)
        assert!(r.coeff(24).eq_exact(&Scalar::from_int(27)));
        assert!(r.coeff(30).eq_exact(&Scalar::from_int(-108)));
    }

    #[test]
    fn order_of_discriminant_two_parameter_family() {
        let f = poly("x^3 + x^2*y^3 + y^9 + x*y^7");
        let fx = f.partial_x();
        let r = resultant_x(&f, &fx).unwrap();
        assert_eq!(ord_y(&r), Some(qi(18)));
    }
}
