//! Univariate root finding over `Scalar` coefficients.
//!
//! Exact inputs go through squarefree decomposition, rational-root screening
//! and the degree <= 2 closed forms, staying exact whenever the discriminant
//! is a perfect square in ℚ(i). Whatever remains is handled by simultaneous
//! Aberth-Ehrlich iteration at the working precision, with a residual-based
//! radius attached to every root and clusters merged into multiplicities.

use super::{Ball, BigFloat, Scalar, ZeroTest};
use crate::error::{Error, Result};
use crate::ratio::Q;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};

/// All complex roots with multiplicity; multiplicities sum to the degree.
pub fn univariate_roots(
    coeffs: &[Scalar],
    target_prec: u32,
    eps: &Q,
) -> Result<Vec<(Scalar, u32)>> {
    let mut c: Vec<Scalar> = coeffs.to_vec();
    // Trim certified-zero leading coefficients.
    while let Some(top) = c.last() {
        match top.zero_test(eps) {
            ZeroTest::Zero => {
                c.pop();
            }
            ZeroTest::NonZero => break,
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    if c.len() <= 1 {
        return Ok(Vec::new());
    }
    // Strip the z^t content: root 0 with multiplicity t.
    let mut out: Vec<(Scalar, u32)> = Vec::new();
    let mut t = 0u32;
    while t < c.len() as u32 - 1 {
        match c[t as usize].zero_test(eps) {
            ZeroTest::Zero => t += 1,
            ZeroTest::NonZero => break,
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    if t > 0 {
        out.push((Scalar::zero(), t));
        c.drain(..t as usize);
    }
    if c.len() <= 1 {
        return Ok(out);
    }

    if c.iter().all(Scalar::is_exact) {
        let c: Vec<Scalar> = c
            .iter()
            .map(|s| if s.is_exact_zero() { Scalar::zero() } else { s.clone() })
            .collect();
        for (factor, mult) in yun_squarefree(&c)? {
            for root in roots_of_squarefree(&factor, target_prec)? {
                out.push((root, mult));
            }
        }
    } else {
        for (root, mult) in aberth_with_clusters(&c, target_prec)? {
            out.push((root, mult));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Exact polynomial helpers over ℚ(i), on coefficient slices (low to high).
// ---------------------------------------------------------------------------

pub(crate) fn trim_exact(mut p: Vec<Scalar>) -> Vec<Scalar> {
    while p.last().map_or(false, Scalar::is_exact_zero) {
        p.pop();
    }
    p
}

pub(crate) fn derivative_exact(p: &[Scalar]) -> Vec<Scalar> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&Scalar::from_int(i as i64)))
        .collect()
}

/// Euclidean division over the field ℚ(i): (quotient, remainder).
pub(crate) fn divrem_exact(a: &[Scalar], b: &[Scalar]) -> (Vec<Scalar>, Vec<Scalar>) {
    let b = trim_exact(b.to_vec());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = trim_exact(a.to_vec());
    let db = b.len() - 1;
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quo = vec![Scalar::zero(); rem.len() - db];
    let lead_inv = b[db].inv().expect("nonzero leading coefficient");
    while rem.len() > db && !rem.is_empty() {
        let dr = rem.len() - 1;
        let factor = rem[dr].mul(&lead_inv);
        let shift = dr - db;
        quo[shift] = factor.clone();
        for (i, bc) in b.iter().enumerate() {
            let sub = factor.mul(bc);
            rem[shift + i] = rem[shift + i].sub(&sub);
        }
        rem = trim_exact(rem);
    }
    (trim_exact(quo), rem)
}

fn monic_exact(p: &[Scalar]) -> Vec<Scalar> {
    let p = trim_exact(p.to_vec());
    if p.is_empty() {
        return p;
    }
    let inv = p.last().unwrap().inv().unwrap();
    p.iter().map(|c| c.mul(&inv)).collect()
}

pub(crate) fn gcd_exact(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut x = trim_exact(a.to_vec());
    let mut y = trim_exact(b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem_exact(&x, &y);
        x = y;
        y = r;
    }
    monic_exact(&x)
}

/// Yun's squarefree decomposition: returns (factor, multiplicity) pairs with
/// product over factor^multiplicity equal to the input up to a constant.
pub(crate) fn yun_squarefree(p: &[Scalar]) -> Result<Vec<(Vec<Scalar>, u32)>> {
    let p = trim_exact(p.to_vec());
    if p.len() <= 1 {
        return Ok(Vec::new());
    }
    let dp = derivative_exact(&p);
    let g = gcd_exact(&p, &dp);
    if g.len() <= 1 {
        return Ok(vec![(p, 1)]);
    }
    let mut out = Vec::new();
    let (mut w, r) = divrem_exact(&p, &g);
    debug_assert!(r.is_empty());
    let (mut y, r) = divrem_exact(&dp, &g);
    debug_assert!(r.is_empty());
    let mut i = 1u32;
    loop {
        // z = y - w'
        let wp = derivative_exact(&w);
        let mut z = y.clone();
        for (k, c) in wp.iter().enumerate() {
            if k < z.len() {
                z[k] = z[k].sub(c);
            } else {
                z.push(c.neg());
            }
        }
        let z = trim_exact(z);
        if z.is_empty() {
            if w.len() > 1 {
                out.push((w, i));
            }
            break;
        }
        let f = gcd_exact(&w, &z);
        if f.len() > 1 {
            out.push((f.clone(), i));
        }
        let (w2, r) = divrem_exact(&w, &f);
        debug_assert!(r.is_empty());
        let (y2, r) = divrem_exact(&z, &f);
        debug_assert!(r.is_empty());
        w = w2;
        y = y2;
        i += 1;
        if i > 512 {
            return Err(Error::Internal("squarefree decomposition ran away".into()));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Roots of an exact squarefree polynomial.
// ---------------------------------------------------------------------------

fn roots_of_squarefree(p: &[Scalar], prec: u32) -> Result<Vec<Scalar>> {
    let mut p = trim_exact(p.to_vec());
    let mut out = Vec::new();
    // Rational-root screening peels off linear factors exactly.
    if p.len() >= 4 {
        for root in rational_roots(&p) {
            let lin = vec![root.neg(), Scalar::one()];
            let (q, r) = divrem_exact(&p, &lin);
            debug_assert!(r.is_empty());
            p = q;
            out.push(root);
        }
    }
    match p.len() {
        0 | 1 => {}
        2 => {
            out.push(p[0].neg().div(&p[1])?);
        }
        3 => {
            out.extend(quadratic_roots(&p[0], &p[1], &p[2], prec)?);
        }
        _ => {
            for (root, mult) in aberth_with_clusters(&p, prec)? {
                for _ in 0..mult {
                    out.push(root.clone());
                }
            }
        }
    }
    Ok(out)
}

/// Quadratic formula; exact when the discriminant is a perfect square in ℚ(i).
fn quadratic_roots(c0: &Scalar, c1: &Scalar, c2: &Scalar, prec: u32) -> Result<Vec<Scalar>> {
    let four = Scalar::from_int(4);
    let disc = c1.mul(c1).sub(&four.mul(c2).mul(c0));
    let two_a = c2.mul(&Scalar::from_int(2));
    let sqrt = match disc.sqrt_exact() {
        Some(s) => s,
        None => {
            let ball = disc.to_ball(prec);
            if ball.re.is_zero() && ball.im.is_zero() && ball.err.is_zero() {
                Scalar::zero()
            } else {
                Scalar::Approx(ball.sqrt_principal()?)
            }
        }
    };
    let r1 = c1.neg().add(&sqrt).div(&two_a)?;
    let r2 = c1.neg().sub(&sqrt).div(&two_a)?;
    Ok(vec![r1, r2])
}

/// Rational roots of an exact polynomial with all-rational coefficients, by
/// the rational root theorem (skipped when the cleared coefficients are too
/// large to enumerate divisors).
fn rational_roots(p: &[Scalar]) -> Vec<Scalar> {
    let mut rats: Vec<Q> = Vec::with_capacity(p.len());
    for c in p {
        match c.exact_parts() {
            Some((re, im)) if im.is_zero() => rats.push(re.clone()),
            _ => return Vec::new(),
        }
    }
    // Clear denominators.
    let mut lcm = num_bigint::BigInt::from(1);
    for r in &rats {
        lcm = num_integer::Integer::lcm(&lcm, r.denom());
    }
    let ints: Vec<num_bigint::BigInt> =
        rats.iter().map(|r| (r * Q::from_integer(lcm.clone())).to_integer()).collect();
    let a0 = ints.iter().find(|v| !v.is_zero()).cloned().unwrap_or_default();
    let an = ints.last().cloned().unwrap_or_default();
    let (d0, dn) = match (a0.abs().to_u64(), an.abs().to_u64()) {
        (Some(x), Some(y)) if x > 0 && y > 0 && x < 1_000_000_000_000 && y < 1_000_000_000_000 => {
            (divisors(x), divisors(y))
        }
        _ => return Vec::new(),
    };
    let mut found = Vec::new();
    let mut poly: Vec<Q> = rats;
    for num in &d0 {
        for den in &dn {
            for sign in [1i64, -1] {
                let cand = Q::new(
                    num_bigint::BigInt::from(*num as i64 * sign),
                    num_bigint::BigInt::from(*den as i64),
                );
                while eval_q(&poly, &cand).is_zero() && poly.len() > 1 {
                    poly = deflate_q(&poly, &cand);
                    found.push(Scalar::from_q(cand.clone()));
                }
            }
        }
    }
    found
}

fn eval_q(p: &[Q], x: &Q) -> Q {
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn deflate_q(p: &[Q], root: &Q) -> Vec<Q> {
    let n = p.len() - 1;
    let mut q = vec![Q::zero(); n];
    let mut carry = Q::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + &carry * root;
        q[i] = carry.clone();
    }
    q
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n && d <= 1_000_000 {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// Aberth-Ehrlich simultaneous iteration.
// ---------------------------------------------------------------------------

fn horner_ball(coeffs: &[Ball], z: &Ball) -> Ball {
    let mut acc = Ball::zero(z.prec);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

/// Aberth-Ehrlich at working precision, returning clustered roots with
/// multiplicities summing to the degree.
fn aberth_with_clusters(coeffs: &[Scalar], prec: u32) -> Result<Vec<(Scalar, u32)>> {
    let n = coeffs.len() - 1;
    let work = prec + 32;
    let balls: Vec<Ball> = coeffs.iter().map(|c| c.to_ball(work)).collect();
    let centers: Vec<Ball> = balls
        .iter()
        .map(|b| Ball::new(b.re.clone(), b.im.clone(), BigFloat::zero(), work))
        .collect();
    let deriv: Vec<Ball> = centers
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul(&Ball::from_f64(Complex64::new(i as f64, 0.0), work)))
        .collect();

    // f64 warm start.
    let cf: Vec<Complex64> = centers.iter().map(Ball::to_f64).collect();
    let mut seeds = aberth_f64(&cf, n)?;

    // High-precision Aberth until steps stall below 2^-(prec+8).
    let mut z: Vec<Ball> = seeds
        .drain(..)
        .map(|s| Ball::from_f64(s, work))
        .collect();
    let max_iter = 48 + (prec as usize) / 8;
    for _ in 0..max_iter {
        let mut max_rel = i64::MIN;
        let mut next = z.clone();
        for i in 0..n {
            let p = horner_ball(&centers, &z[i]);
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let dp = horner_ball(&deriv, &z[i]);
            let newton = match p.div(&dp) {
                Ok(v) => v,
                Err(_) => continue, // derivative ~ 0: cluster handles it
            };
            let mut repulse = Ball::zero(work);
            let mut degenerate = false;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = z[i].sub(&z[j]);
                match d.inv() {
                    Ok(v) => repulse = repulse.add(&v),
                    Err(_) => {
                        degenerate = true;
                        break;
                    }
                }
            }
            let step = if degenerate {
                newton.clone()
            } else {
                let denom = Ball::from_f64(Complex64::new(1.0, 0.0), work)
                    .sub(&newton.mul(&repulse));
                match newton.div(&denom) {
                    Ok(v) => v,
                    Err(_) => newton.clone(),
                }
            };
            let updated = z[i].sub(&step);
            let rel = step.abs_up().msb_exp().unwrap_or(i64::MIN / 2)
                - updated.abs_low().msb_exp().unwrap_or(0);
            max_rel = max_rel.max(rel);
            next[i] = Ball::new(updated.re, updated.im, BigFloat::zero(), work);
        }
        z = next;
        if max_rel < -(prec as i64 + 8) {
            break;
        }
    }

    // Residual radii: min distance to a true root <= n |p(z)| / |p'(z)|.
    let nf = Q::from_integer(num_bigint::BigInt::from(n as u32));
    let mut roots: Vec<(Ball, Q)> = Vec::with_capacity(n);
    for zi in &z {
        let p = horner_ball(&balls, zi);
        let dp = horner_ball(&balls[1..].iter().enumerate().map(|(i, c)| {
            c.mul(&Ball::from_f64(Complex64::new((i + 1) as f64, 0.0), work))
        }).collect::<Vec<_>>(), zi);
        let up = p.abs_up().to_rational() + p.err_rational();
        let low = dp.abs_low().to_rational() - dp.err_rational();
        let radius = if low.is_positive() {
            &nf * up / low
        } else {
            // Derivative indistinguishable from zero: fold into a cluster by
            // giving this root a radius that reaches its nearest neighbor.
            let mut nearest = Q::from_integer(num_bigint::BigInt::from(u32::MAX));
            for zj in &z {
                let d = zi.sub(zj);
                let sep = d.abs_up().to_rational();
                if !sep.is_zero() && sep < nearest {
                    nearest = sep;
                }
            }
            nearest * Q::from_integer(2.into())
        };
        roots.push((zi.clone(), radius));
    }

    // Merge clusters: i ~ j when |z_i - z_j| <= r_i + r_j.
    let mut assigned = vec![usize::MAX; n];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        let mut members = vec![i];
        assigned[i] = clusters.len();
        let mut cursor = 0;
        while cursor < members.len() {
            let a = members[cursor];
            for b in 0..n {
                if assigned[b] != usize::MAX {
                    continue;
                }
                let d = roots[a].0.sub(&roots[b].0);
                let sep = d.abs_low().to_rational() - d.err_rational();
                if sep <= &roots[a].1 + &roots[b].1 {
                    assigned[b] = clusters.len();
                    members.push(b);
                }
            }
            cursor += 1;
        }
        clusters.push(members);
    }

    let mut out = Vec::with_capacity(clusters.len());
    for members in clusters {
        let mult = members.len() as u32;
        let rep = &roots[members[0]];
        let mut radius = Q::zero();
        for &m in &members {
            let d = roots[m].0.sub(&rep.0);
            let reach = d.abs_up().to_rational() + d.err_rational() + roots[m].1.clone();
            if reach > radius {
                radius = reach;
            }
        }
        let (err, eup) = BigFloat::from_rational(&radius, 32);
        let ball = Ball::new(
            rep.0.re.clone(),
            rep.0.im.clone(),
            err.add(&eup).round_up_mag(),
            prec,
        );
        out.push((Scalar::Approx(ball), mult));
    }
    Ok(out)
}

fn aberth_f64(coeffs: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::PrecisionExhausted);
    }
    let lead = coeffs[n];
    // Cauchy bound for the root radius.
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64;
            Complex64::from_polar(radius * 0.7, angle) + Complex64::new(0.1, 0.05)
        })
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    };
    for _ in 0..400 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let w = if dp.norm() > 0.0 { p / dp } else { Complex64::new(1e-8, 1e-8) };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if i != j {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        s += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let step = if denom.norm() > 1e-300 { w / denom } else { w };
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-13 {
            break;
        }
    }
    Ok(z)
}
