//! Complex balls: a dyadic center plus one radius bounding the total
//! absolute error. Centers are rounded to the working precision; radii are
//! propagated outward (always an upper bound).

use super::bigfloat::BigFloat;
use crate::error::{Error, Result};
use crate::ratio::Q;
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct Ball {
    pub re: BigFloat,
    pub im: BigFloat,
    /// Upper bound on the complex absolute error of the center.
    pub err: BigFloat,
    pub prec: u32,
}

impl Ball {
    pub fn new(re: BigFloat, im: BigFloat, err: BigFloat, prec: u32) -> Self {
        debug_assert!(!err.is_negative());
        Ball { re, im, err, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Ball::new(BigFloat::zero(), BigFloat::zero(), BigFloat::zero(), prec)
    }

    pub fn from_rationals(re: &Q, im: &Q, prec: u32) -> Self {
        let (r, er) = BigFloat::from_rational(re, prec);
        let (i, ei) = BigFloat::from_rational(im, prec);
        Ball::new(r, i, er.add(&ei).round_up_mag(), prec)
    }

    pub fn from_f64(z: Complex64, prec: u32) -> Self {
        Ball::new(
            BigFloat::from_f64(z.re),
            BigFloat::from_f64(z.im),
            BigFloat::zero(),
            prec,
        )
    }

    pub fn to_f64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn neg(&self) -> Self {
        Ball::new(self.re.neg(), self.im.neg(), self.err.clone(), self.prec)
    }

    pub fn conj(&self) -> Self {
        Ball::new(self.re.clone(), self.im.neg(), self.err.clone(), self.prec)
    }

    /// Exact squared magnitude of the center, as a rational.
    pub fn center_abs_sq(&self) -> Q {
        let re = self.re.to_rational();
        let im = self.im.to_rational();
        re.clone() * re + im.clone() * im
    }

    pub fn err_rational(&self) -> Q {
        self.err.to_rational()
    }

    /// Upper bound on |center| (cheap: |re| + |im|, within sqrt(2)).
    fn center_abs_up(&self) -> BigFloat {
        self.re.abs().add(&self.im.abs())
    }

    /// Lower bound on |center|: max(|re|, |im|).
    fn center_abs_low(&self) -> BigFloat {
        self.re.abs().max(self.im.abs())
    }

    /// Tight upper bound on |center| via a rounded square root.
    pub fn abs_up(&self) -> BigFloat {
        let sq = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let (v, e) = sq.sqrt(48);
        v.add(&e)
    }

    /// Lower bound on |center| (may be zero).
    pub fn abs_low(&self) -> BigFloat {
        let sq = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let (v, e) = sq.sqrt(48);
        let low = v.sub(&e);
        if low.is_negative() {
            BigFloat::zero()
        } else {
            low
        }
    }

    fn rounded(re: BigFloat, im: BigFloat, err: BigFloat, prec: u32) -> Self {
        let (re, er) = re.round(prec + 4);
        let (im, ei) = im.round(prec + 4);
        let err = err.add(&er).add(&ei).round_up_mag();
        Ball::new(re, im, err, prec)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let prec = self.prec.max(rhs.prec);
        Self::rounded(
            self.re.add(&rhs.re),
            self.im.add(&rhs.im),
            self.err.add(&rhs.err),
            prec,
        )
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let prec = self.prec.max(rhs.prec);
        let re = self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im));
        let im = self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re));
        // |ab - âb̂| <= |a| e_b + |b| e_a + e_a e_b
        let err = self
            .center_abs_up()
            .mul(&rhs.err)
            .add(&rhs.center_abs_up().mul(&self.err))
            .add(&self.err.mul(&rhs.err));
        Self::rounded(re, im, err, prec)
    }

    /// Multiplicative inverse; fails when the ball may contain zero.
    pub fn inv(&self) -> Result<Self> {
        let low = self.center_abs_low();
        if low <= self.err {
            return Err(Error::PrecisionExhausted);
        }
        let prec = self.prec;
        let denom = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        let (re, er) = self.re.div(&denom, prec + 8);
        let (im_neg, ei) = self.im.div(&denom, prec + 8);
        // |1/w - 1/ŵ| <= e / (|ŵ| (|ŵ| - e)); |ŵ| >= low.
        let gap = low.sub(&self.err);
        let (ball_err, eb) = self.err.div(&low.mul(&gap), 32);
        let err = ball_err.add(&eb).add(&er).add(&ei).round_up_mag();
        Ok(Ball::new(re, im_neg.neg(), err, prec))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow_u32(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Ball::new(BigFloat::one(), BigFloat::zero(), BigFloat::zero(), self.prec);
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

    /// All k-th roots of this ball. Exponent-scales out of f64 range, seeds
    /// with f64 arithmetic, polishes with Newton at full precision, and
    /// attaches a residual-based radius.
    pub fn kth_roots(&self, k: u32) -> Result<Vec<Ball>> {
        assert!(k >= 1);
        if k == 1 {
            return Ok(vec![self.clone()]);
        }
        let low = self.center_abs_low();
        if low <= self.err {
            return Err(Error::PrecisionExhausted);
        }
        let prec = self.prec;
        // Pull out 2^(k*t) so the remaining part is f64-sized.
        let msb = self.re.msb_exp().into_iter().chain(self.im.msb_exp()).max().unwrap();
        let t = msb.div_euclid(k as i64);
        let scaled = Ball::new(
            self.re.mul_pow2(-(k as i64) * t),
            self.im.mul_pow2(-(k as i64) * t),
            BigFloat::zero(),
            prec,
        );
        let seed_base = scaled.to_f64().powf(1.0 / k as f64);
        let mut out = Vec::with_capacity(k as usize);
        for j in 0..k {
            let angle = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
            let seed = seed_base * Complex64::new(angle.cos(), angle.sin());
            let root = newton_kth_root(&scaled, k, seed, prec)?;
            // Bound |root - true root| by n|p(z)|/|p'(z)| for p(z) = z^k - a.
            let res = root.pow_u32(k).sub(&scaled);
            let res_up = res.abs_up().add(&res.err);
            let rlow = root.abs_low().sub(&root.err);
            if rlow.is_negative() || rlow.is_zero() {
                return Err(Error::PrecisionExhausted);
            }
            let mut denom = BigFloat::one();
            for _ in 0..k - 1 {
                denom = denom.mul(&rlow);
            }
            let (extra, ee) = res_up.div(&denom, 32);
            // Account for the input radius via |d root / d a| = |root| / (k |a|).
            let (deriv, ed) = root.abs_up().div(&low.mul(&BigFloat::from_i64(k as i64)), 32);
            let in_err = deriv.add(&ed).mul(&self.err);
            let err = root.err.add(&extra).add(&ee).add(&in_err).round_up_mag();
            out.push(Ball::new(
                root.re.mul_pow2(t),
                root.im.mul_pow2(t),
                err.mul_pow2(t).round_up_mag(),
                prec,
            ));
        }
        Ok(out)
    }

    /// Principal square root (other root is the negation).
    pub fn sqrt_principal(&self) -> Result<Ball> {
        if self.re.is_zero() && self.im.is_zero() && self.err.is_zero() {
            return Ok(Ball::zero(self.prec));
        }
        let roots = self.kth_roots(2)?;
        // kth_roots(2) seeds j=0 with the principal f64 root.
        Ok(roots.into_iter().next().unwrap())
    }
}

/// Newton iteration for z^k = a, centers only (errors attached by caller).
fn newton_kth_root(a: &Ball, k: u32, seed: Complex64, prec: u32) -> Result<Ball> {
    if seed.norm() == 0.0 || !seed.is_finite() {
        return Err(Error::PrecisionExhausted);
    }
    let work = prec + 16;
    let mut z = Ball::from_f64(seed, work);
    let kf = Ball::from_f64(Complex64::new(k as f64, 0.0), work);
    let a0 = Ball::new(a.re.clone(), a.im.clone(), BigFloat::zero(), work);
    // Quadratic convergence: ~log2(prec) iterations from an f64 seed.
    let max_iter = 64 + 2 * (32 - (prec.leading_zeros().min(31))) as usize;
    for _ in 0..max_iter {
        let zk1 = z.pow_u32(k - 1);
        let f = zk1.mul(&z).sub(&a0);
        let fp = kf.mul(&zk1);
        let step = f.div(&fp)?;
        let znew = z.sub(&step);
        let step_msb = step.abs_up().msb_exp().unwrap_or(i64::MIN / 2);
        let z_msb = znew.abs_low().msb_exp().unwrap_or(0);
        z = Ball::new(znew.re, znew.im, BigFloat::zero(), work);
        if step_msb < z_msb - (prec as i64 + 8) {
            return Ok(Ball::new(z.re, z.im, BigFloat::zero(), prec));
        }
    }
    Err(Error::PrecisionExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{q, qi};
    use num_traits::Signed;

    fn ball(re: f64, im: f64) -> Ball {
        Ball::from_f64(Complex64::new(re, im), 128)
    }

    #[test]
    fn ring_ops_track_error() {
        let a = ball(1.5, -2.0);
        let b = ball(0.25, 3.0);
        let s = a.add(&b);
        assert_eq!(s.to_f64(), Complex64::new(1.75, 1.0));
        let p = a.mul(&b);
        // (1.5 - 2i)(0.25 + 3i) = 0.375 + 6 + (4.5 - 0.5) i
        assert!((p.to_f64() - Complex64::new(6.375, 4.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_within_radius() {
        let a = Ball::from_rationals(&qi(3), &qi(-4), 192);
        let inv = a.inv().unwrap();
        let expected_re = q(3, 25);
        let expected_im = q(4, 25);
        let dre = (inv.re.to_rational() - expected_re).abs();
        let dim = (inv.im.to_rational() - expected_im).abs();
        let e = inv.err_rational();
        assert!(dre <= e.clone() && dim <= e);
    }

    #[test]
    fn division_by_near_zero_fails() {
        let tiny = Ball::new(
            BigFloat::pow2(-500),
            BigFloat::zero(),
            BigFloat::pow2(-400),
            128,
        );
        assert!(tiny.inv().is_err());
    }

    #[test]
    fn kth_roots_cover_all_roots() {
        let a = Ball::from_rationals(&qi(4096), &qi(0), 256);
        let roots = a.kth_roots(12).unwrap();
        assert_eq!(roots.len(), 12);
        // One of them is the real positive root 2.
        let two = roots
            .iter()
            .map(|r| (r.to_f64() - Complex64::new(2.0, 0.0)).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(two < 1e-12);
        // Every root raised to the 12th power lands back on 4096, with the
        // residual controlled by the reported radius.
        for r in &roots {
            let back = r.pow_u32(12);
            assert!((back.to_f64() - Complex64::new(4096.0, 0.0)).norm() < 1e-9);
            assert!(r.err_rational() < q(1, i64::MAX));
        }
    }

    #[test]
    fn sqrt_of_two_is_tight() {
        let a = Ball::from_rationals(&qi(2), &qi(0), 256);
        let s = a.sqrt_principal().unwrap();
        // Rational residual of the center: |s^2 - 2| should be ~2^-256.
        let sq = s.center_abs_sq();
        let resid = (sq - qi(2)).abs();
        let tiny = Q::new(1.into(), num_bigint::BigInt::from(2).pow(200));
        assert!(resid < tiny);
        assert!(s.err_rational() < tiny);
        assert!(s.im.to_rational().abs() < tiny);
    }
}
