//! Newton-Puiseux expansion of the roots `x = α(y)` of a bivariate
//! polynomial, conjugate enumeration, contact orders, and certified
//! composition `f(α(y), y)`.
//!
//! Strategy: squarefree split in `x` first (multiplicities recorded), then
//! Newton-polygon recursion while an edge root stays multiple; once a branch
//! is simple, Newton lifting doubles the certified order per step. Exact
//! roots are detected by an identically-vanishing substitution and get an
//! infinite residual.

pub mod polygon;

pub use polygon::{newton_polygon, polygon_of_fracpoly, NewtonPolygon, PolygonEdge};

use crate::config::Options;
use crate::error::{Error, Result};
use crate::poly::{squarefree_parts_x, BivarPoly};
use crate::ratio::{lcm_denoms, Q, XRat};
use crate::scalar::{Scalar, ZeroTest};
use crate::series::{FracPoly, FracSeries};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// A truncated Puiseux root `x = Σ c_i y^{e_i}` with a residual certificate:
/// the true root differs from the truncation by `O(y^residual)`.
#[derive(Debug, Clone)]
pub struct PuiseuxArc {
    /// Strictly increasing exponents, nonzero coefficients.
    pub terms: Vec<(Q, Scalar)>,
    /// Ramification index: minimal N with all exponents in (1/N)ℤ.
    pub ram: u32,
    pub residual: XRat,
    pub mult: u32,
    /// Conjugacy class id within the producing call.
    pub conj_class: usize,
    /// Index j of the θ-twist relative to the class representative.
    pub theta_index: u32,
}

impl PuiseuxArc {
    pub fn order(&self) -> XRat {
        match self.terms.first() {
            Some((e, _)) => XRat::Fin(e.clone()),
            None => XRat::Inf,
        }
    }

    pub fn leading(&self) -> Option<&(Q, Scalar)> {
        self.terms.first()
    }

    /// Serialization fragment: `{"N", "terms", "residual", "mult"}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "N": self.ram,
            "terms": self.terms.iter().map(|(e, c)| serde_json::json!({
                "exp": crate::ratio::fmt_q(e),
                "coeff": c,
            })).collect::<Vec<_>>(),
            "residual": self.residual.to_string(),
            "mult": self.mult,
        })
    }
}

/// Expansion of `f(α(y), y)` certified below `window`.
#[derive(Debug, Clone)]
pub struct GermExpansion {
    pub terms: Vec<(Q, Scalar)>,
    pub window: XRat,
}

impl GermExpansion {
    pub fn leading(&self) -> Option<&(Q, Scalar)> {
        self.terms.first()
    }

    pub fn coeff_at(&self, e: &Q) -> Scalar {
        self.terms
            .iter()
            .find(|(exp, _)| exp == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Scalar::zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "terms": self.terms.iter().map(|(e, c)| serde_json::json!({
                "exp": crate::ratio::fmt_q(e),
                "coeff": c,
            })).collect::<Vec<_>>(),
            "window": self.window.to_string(),
        })
    }
}

/// An arc bundled with its defining polynomial so truncations can be
/// extended on demand.
#[derive(Debug, Clone)]
pub struct RefinableArc {
    pub arc: PuiseuxArc,
    source: FracPoly,
}

impl RefinableArc {
    pub fn from_parts(arc: PuiseuxArc, source: FracPoly) -> Self {
        RefinableArc { arc, source }
    }
}

// ---------------------------------------------------------------------------
// Expansion driver
// ---------------------------------------------------------------------------

struct Expander<'a> {
    opts: &'a Options,
    cap: XRat,
    out: Vec<(Vec<(Q, Scalar)>, XRat, u32)>, // (terms, residual, mult)
}

impl<'a> Expander<'a> {
    /// Depth-first over polygon edges. `prefix` holds the terms fixed so
    /// far; every shift is taken from the original `source`, so nested
    /// levels never compound.
    fn expand(
        &mut self,
        source: &FracPoly,
        prefix: &mut Vec<(Q, Scalar)>,
        min_slope: &Q,
        part_mult: u32,
    ) -> Result<()> {
        if prefix.len() > self.opts.max_terms {
            return Err(Error::TruncationCapExceeded);
        }
        let eps = self.opts.eps();
        let g = if prefix.is_empty() {
            source.clone()
        } else {
            source.shift(prefix, &self.cap)
        };
        // Exact root at the current prefix: z divides the shifted polynomial.
        let (m, rest) = g.strip_z_content(&eps)?;
        if m > 0 {
            self.out.push((prefix.clone(), XRat::Inf, part_mult * m as u32));
        }
        if rest.deg_z().unwrap_or(0) == 0 {
            return Ok(());
        }
        let poly = polygon_of_fracpoly(&rest, &eps)?;
        let edges: Vec<(Q, Vec<(Scalar, u32)>)> = poly
            .edges
            .iter()
            .filter(|e| &e.slope > min_slope)
            .map(|e| Ok((e.slope.clone(), e.poly.roots(self.opts.precision, &eps)?)))
            .collect::<Result<_>>()?;
        for (slope, roots) in edges {
            for (c, root_mult) in roots {
                if matches!(c.zero_test(&eps), ZeroTest::Zero) {
                    continue;
                }
                prefix.push((slope.clone(), c.clone()));
                if root_mult == 1 {
                    // Simple branch: Newton lifting finishes it.
                    let shifted = source.shift(prefix, &self.cap);
                    let (tail, residual) = newton_extend(
                        source,
                        prefix.clone(),
                        shifted,
                        self.opts,
                        &self.cap,
                        &Q::zero(),
                    )?;
                    self.out.push((tail, residual, part_mult));
                } else {
                    // A multiple edge root bundles root_mult branches with a
                    // common prefix; they are enumerated below, so the
                    // multiplicity is not compounded.
                    self.expand(source, prefix, &slope, part_mult)?;
                }
                prefix.pop();
            }
        }
        Ok(())
    }
}

/// Extend a simple branch until its residual certificate reaches the cap (or
/// stays infinite for exact roots). Returns the term list and the residual.
fn newton_extend(
    source: &FracPoly,
    mut terms: Vec<(Q, Scalar)>,
    mut shifted: FracPoly,
    opts: &Options,
    cap: &XRat,
    target: &Q,
) -> Result<(Vec<(Q, Scalar)>, XRat)> {
    let eps = opts.eps();
    let target = target.clone();
    let mut last_residual: Option<Q> = None;
    loop {
        let g0 = shifted
            .col(0)
            .cloned()
            .unwrap_or_else(|| FracSeries::zero(XRat::Inf));
        let ord0 = g0.ord_checked(&eps)?;
        let g1 = shifted
            .col(1)
            .cloned()
            .ok_or_else(|| Error::Internal("simple branch lost its linear term".into()))?;
        let ord1 = match g1.ord_checked(&eps)? {
            XRat::Fin(v) => v,
            XRat::Inf => {
                return Err(Error::Internal("vanishing derivative on simple branch".into()))
            }
        };
        let residual = match &ord0 {
            XRat::Inf => return Ok((terms, XRat::Inf)),
            XRat::Fin(w) => {
                if let XRat::Fin(win) = &g0.window {
                    if w >= win {
                        return Err(Error::TruncationCapExceeded);
                    }
                }
                w - &ord1
            }
        };
        if residual >= target {
            return Ok((terms, XRat::Fin(residual)));
        }
        if let Some(prev) = &last_residual {
            if &residual <= prev {
                return Err(Error::Internal("newton lifting stalled".into()));
            }
        }
        last_residual = Some(residual.clone());
        // Validity span of the Newton correction δ = -g0/g1: the true tail
        // agrees with δ below min_{i>=2}(ord g_i + i R) - ord g1.
        let mut valid = XRat::Fin(&residual + &residual + &ord1); // i = 2, ord g2 >= 0 fallback
        for (i, col) in shifted.cols.iter().enumerate().skip(2) {
            let oi = col.ord_checked(&eps)?;
            let bound = oi.add_xrat(&XRat::Fin(
                Q::from_integer(BigInt::from(i as u32)) * residual.clone(),
            ));
            valid = valid.min_with(bound);
        }
        let valid = match valid {
            XRat::Fin(v) => XRat::Fin((v - &ord1).min(target.clone())),
            XRat::Inf => XRat::Fin(target.clone()),
        };
        let delta = g0.neg().div(&g1, &valid, &eps)?;
        let mut added = 0;
        for (e, c) in delta.term_vec() {
            if matches!(c.zero_test(&eps), ZeroTest::Zero) {
                continue;
            }
            terms.push((e, c));
            added += 1;
        }
        if added == 0 {
            // δ vanished below its validity span: the residual jumps there.
            match delta.window {
                XRat::Fin(w) => {
                    if w >= target {
                        return Ok((terms, XRat::Fin(w)));
                    }
                    return Err(Error::TruncationCapExceeded);
                }
                XRat::Inf => return Ok((terms, XRat::Inf)),
            }
        }
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        if terms.len() > opts.max_terms {
            return Err(Error::TruncationCapExceeded);
        }
        shifted = source.shift(&terms, cap);
    }
}

// ---------------------------------------------------------------------------
// Public entry points
// ---------------------------------------------------------------------------

/// All Puiseux roots of `F` through the origin (order > 0), one
/// representative per conjugacy class, expanded until the residual
/// certificate reaches `target_residual`.
pub fn puiseux_roots(
    f: &BivarPoly,
    target_residual: &Q,
    opts: &Options,
) -> Result<Vec<RefinableArc>> {
    if f.is_zero() {
        return Err(Error::PreconditionNotMet("zero polynomial".into()));
    }
    let total_deg = f.total_degree().unwrap_or(1);
    // Cap scales with both the germ degree and the requested certificate.
    let cap_q = opts.window_cap(total_deg).max(target_residual * Q::from_integer(2.into()));
    let cap = XRat::Fin(cap_q);
    let mut raw: Vec<(Vec<(Q, Scalar)>, XRat, u32, FracPoly)> = Vec::new();
    let exact_input = f.terms().all(|(_, c)| c.is_exact());
    let parts: Vec<(BivarPoly, u32)> = if exact_input {
        squarefree_parts_x(f)?
    } else {
        vec![(f.clone(), 1)]
    };
    for (part, mult) in parts {
        let g = FracPoly::from_bivar(&part);
        let mut expander = Expander { opts, cap: cap.clone(), out: Vec::new() };
        let mut prefix = Vec::new();
        expander.expand(&g, &mut prefix, &Q::zero(), mult)?;
        for (terms, residual, m) in expander.out {
            raw.push((terms, residual, m, g.clone()));
        }
    }
    // Refine every truncation to the requested residual before grouping.
    let mut arcs: Vec<RefinableArc> = Vec::new();
    for (terms, residual, mult, src) in raw {
        let arc = PuiseuxArc {
            ram: ramification(&terms),
            terms,
            residual,
            mult,
            conj_class: 0,
            theta_index: 0,
        };
        let mut ra = RefinableArc { arc, source: src };
        ra.ensure_residual(target_residual, opts)?;
        arcs.push(ra);
    }
    group_conjugates(arcs, opts)
}

fn ramification(terms: &[(Q, Scalar)]) -> u32 {
    lcm_denoms(terms.iter().map(|(e, _)| e)).unwrap_or(1)
}

impl RefinableArc {
    /// Extend the truncation until `residual >= target`.
    pub fn ensure_residual(&mut self, target: &Q, opts: &Options) -> Result<()> {
        if self.arc.residual >= XRat::Fin(target.clone()) {
            return Ok(());
        }
        let mut cap = match refinement_cap(&self.source, target, opts)? {
            XRat::Fin(c) => c,
            XRat::Inf => unreachable!(),
        };
        for _attempt in 0..4 {
            let capx = XRat::Fin(cap.clone());
            let shifted = self.source.shift(&self.arc.terms, &capx);
            match newton_extend(
                &self.source,
                self.arc.terms.clone(),
                shifted,
                opts,
                &capx,
                target,
            ) {
                Ok((terms, residual)) => {
                    self.arc.terms = terms;
                    self.arc.residual = residual;
                    self.arc.ram = ramification(&self.arc.terms);
                    return Ok(());
                }
                // The series window blocked the certificate: widen and retry.
                Err(Error::TruncationCapExceeded) => {
                    cap = &cap * Q::from_integer(2.into());
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::TruncationCapExceeded)
    }
}

fn refinement_cap(g: &FracPoly, target: &Q, opts: &Options) -> Result<XRat> {
    let deg_hint = g
        .cols
        .iter()
        .filter_map(|c| c.min_exp())
        .map(|e| e.ceil().to_integer().to_u32().unwrap_or(0))
        .max()
        .unwrap_or(1)
        .max(g.deg_z().unwrap_or(1) as u32);
    let cap = opts
        .window_cap(deg_hint)
        .max(target * Q::from_integer(2.into()));
    Ok(XRat::Fin(cap))
}

// ---------------------------------------------------------------------------
// Conjugates
// ---------------------------------------------------------------------------

/// The `j`-th conjugate: coefficients twisted by `θ^{j n_i}` where
/// `e_i = n_i / N` and θ is a primitive N-th root of unity.
pub fn conjugate(arc: &PuiseuxArc, j: u32, opts: &Options) -> Result<PuiseuxArc> {
    let n = arc.ram;
    if n <= 1 || j % n == 0 {
        let mut out = arc.clone();
        out.theta_index = if n == 0 { 0 } else { j % n.max(1) };
        return Ok(out);
    }
    let mut terms = Vec::with_capacity(arc.terms.len());
    for (e, c) in &arc.terms {
        let ni = (e * Q::from_integer(BigInt::from(n))).to_integer();
        let power = (ni * BigInt::from(j))
            .mod_floor(&BigInt::from(n))
            .to_i64()
            .unwrap_or(0);
        let theta_pow = Scalar::unity_root(n, power, opts.precision)?;
        terms.push((e.clone(), c.mul(&theta_pow)));
    }
    Ok(PuiseuxArc {
        terms,
        ram: n,
        residual: arc.residual.clone(),
        mult: arc.mult,
        conj_class: arc.conj_class,
        theta_index: j,
    })
}

/// All `N` conjugates of a representative.
pub fn conjugates(arc: &PuiseuxArc, opts: &Options) -> Result<Vec<PuiseuxArc>> {
    (0..arc.ram.max(1)).map(|j| conjugate(arc, j, opts)).collect()
}

/// Group raw branches into conjugacy classes; returns one representative per
/// class with `ram` recorded and classes numbered in canonical order.
fn group_conjugates(arcs: Vec<RefinableArc>, opts: &Options) -> Result<Vec<RefinableArc>> {
    let eps = opts.eps();
    let mut sorted = arcs;
    sorted.sort_by(|a, b| canonical_arc_cmp(&a.arc, &b.arc));
    let mut reps: Vec<RefinableArc> = Vec::new();
    'next: for cand in sorted {
        for rep in reps.iter() {
            if rep.arc.ram != cand.arc.ram
                || rep.arc.mult != cand.arc.mult
                || rep.arc.terms.len() != cand.arc.terms.len()
            {
                continue;
            }
            for j in 1..rep.arc.ram {
                let twisted = conjugate(&rep.arc, j, opts)?;
                if arcs_equal(&twisted, &cand.arc, &eps)? {
                    continue 'next;
                }
            }
        }
        let mut cand = cand;
        cand.arc.conj_class = reps.len();
        cand.arc.theta_index = 0;
        reps.push(cand);
    }
    Ok(reps)
}

fn arcs_equal(a: &PuiseuxArc, b: &PuiseuxArc, eps: &Q) -> Result<bool> {
    if a.terms.len() != b.terms.len() {
        return Ok(false);
    }
    for ((ea, ca), (eb, cb)) in a.terms.iter().zip(&b.terms) {
        if ea != eb {
            return Ok(false);
        }
        match ca.sub(cb).zero_test(eps) {
            ZeroTest::Zero => continue,
            ZeroTest::NonZero => return Ok(false),
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    Ok(true)
}

pub fn canonical_arc_cmp(a: &PuiseuxArc, b: &PuiseuxArc) -> std::cmp::Ordering {
    match (a.terms.first(), b.terms.first()) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some((ea, ca)), Some((eb, cb))) => {
            ea.cmp(eb).then_with(|| ca.canonical_cmp(cb)).then_with(|| {
                for ((xa, ya), (xb, yb)) in a.terms.iter().zip(&b.terms).skip(1) {
                    let c = xa.cmp(xb).then_with(|| ya.canonical_cmp(yb));
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                a.terms.len().cmp(&b.terms.len())
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Contact orders
// ---------------------------------------------------------------------------

/// Result of a contact-order computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Contact {
    /// First differing exponent.
    At(Q),
    /// Agreement up to the joint certification limit.
    IndistinguishableAt(XRat),
}

/// `ord_y(α(y) - β(y))`: the exponent of the first differing term, or
/// `IndistinguishableAt(min residual)` when the truncations agree.
pub fn contact_order(a: &PuiseuxArc, b: &PuiseuxArc, eps: &Q) -> Result<Contact> {
    let limit = a.residual.clone().min_with(b.residual.clone());
    let mut exps: Vec<&Q> = a
        .terms
        .iter()
        .map(|(e, _)| e)
        .chain(b.terms.iter().map(|(e, _)| e))
        .collect();
    exps.sort();
    exps.dedup();
    for e in exps {
        if XRat::Fin((*e).clone()) >= limit {
            break;
        }
        let ca = coeff_of(a, e);
        let cb = coeff_of(b, e);
        match ca.sub(&cb).zero_test(eps) {
            ZeroTest::NonZero => return Ok(Contact::At(e.clone())),
            ZeroTest::Zero => continue,
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    Ok(Contact::IndistinguishableAt(limit))
}

fn coeff_of(arc: &PuiseuxArc, e: &Q) -> Scalar {
    arc.terms
        .iter()
        .find(|(exp, _)| exp == e)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(Scalar::zero)
}

/// Starred contact: maximum of `contact_order` over all conjugate pairs.
pub fn contact_order_starred(a: &PuiseuxArc, b: &PuiseuxArc, opts: &Options) -> Result<Contact> {
    let eps = opts.eps();
    let mut best_finite: Option<Q> = None;
    let mut indist: Option<XRat> = None;
    for ca in conjugates(a, opts)? {
        for cb in conjugates(b, opts)? {
            match contact_order(&ca, &cb, &eps)? {
                Contact::At(e) => {
                    if best_finite.as_ref().map_or(true, |cur| &e > cur) {
                        best_finite = Some(e);
                    }
                }
                Contact::IndistinguishableAt(l) => {
                    if indist.as_ref().map_or(true, |cur| &l > cur) {
                        indist = Some(l);
                    }
                }
            }
        }
    }
    match (best_finite, indist) {
        (Some(e), None) => Ok(Contact::At(e)),
        (Some(e), Some(l)) => {
            if XRat::Fin(e.clone()) >= l {
                Ok(Contact::At(e))
            } else {
                Ok(Contact::IndistinguishableAt(l))
            }
        }
        (None, Some(l)) => Ok(Contact::IndistinguishableAt(l)),
        (None, None) => Err(Error::Internal("no conjugate pairs".into())),
    }
}

// ---------------------------------------------------------------------------
// Germ composition
// ---------------------------------------------------------------------------

/// Expansion of `f(α(y), y)` with window >= `required`, refining the arc as
/// needed. Truncation error order: min over d >= 1 of
/// `ord f^{(d)}(A) + d * residual`.
pub fn compose_germ(
    f: &BivarPoly,
    ra: &mut RefinableArc,
    required: &Q,
    opts: &Options,
) -> Result<GermExpansion> {
    let eps = opts.eps();
    let total_deg = f.total_degree().unwrap_or(1);
    let cap_q = opts
        .window_cap(total_deg)
        .max(required * Q::from_integer(2.into()));
    let cap = XRat::Fin(cap_q);
    for _attempt in 0..40 {
        let shifted = FracPoly::from_bivar(f).shift(&ra.arc.terms, &cap);
        let value = shifted
            .col(0)
            .cloned()
            .unwrap_or_else(|| FracSeries::zero(XRat::Inf));
        // Truncation error window.
        let mut err_window = XRat::Inf;
        if let XRat::Fin(r) = &ra.arc.residual {
            for (d, col) in shifted.cols.iter().enumerate().skip(1) {
                let od = col.ord_checked(&eps)?;
                let term = od.add_xrat(&XRat::Fin(Q::from_integer(BigInt::from(d as u32)) * r));
                err_window = err_window.min_with(term);
            }
        }
        let window = value.window.clone().min_with(err_window);
        if window >= XRat::Fin(required.clone()) {
            let mut terms: Vec<(Q, Scalar)> = Vec::new();
            for (e, c) in value.term_vec() {
                if XRat::Fin(e.clone()) >= window {
                    continue;
                }
                match c.zero_test(&eps) {
                    ZeroTest::Zero => continue,
                    ZeroTest::NonZero => terms.push((e, c)),
                    ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
                }
            }
            return Ok(GermExpansion { terms, window });
        }
        // Refine: need residual R' with min_d (ord f^(d)(A) + d R') >= required.
        let current = match &ra.arc.residual {
            XRat::Fin(r) => r.clone(),
            XRat::Inf => return Err(Error::TruncationCapExceeded),
        };
        let mut target = &current + &current;
        if target < *required {
            target = required.clone();
        }
        ra.ensure_residual(&target, opts)?;
        if ra.arc.residual == XRat::Fin(current) {
            return Err(Error::TruncationCapExceeded);
        }
    }
    Err(Error::TruncationCapExceeded)
}

/// Evaluate `f` along an explicit series (exact inputs give exact results).
/// Used by the sampling oracle.
pub fn eval_along(f: &BivarPoly, series_terms: &[(Q, Scalar)], cap: &XRat) -> FracSeries {
    FracPoly::from_bivar(f).eval_at(series_terms, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;
    use crate::ratio::{q, qi};

    fn opts() -> Options {
        Options::default()
    }

    fn poly(text: &str) -> BivarPoly {
        parse_poly(text, &Default::default()).unwrap()
    }

    fn roots_of(text: &str, target: Q) -> Vec<RefinableArc> {
        puiseux_roots(&poly(text), &target, &opts()).unwrap()
    }

    #[test]
    fn exact_polar_pair_of_cusp_family() {
        // 3x^2 - 3y^10: roots ±y^5, exact, N = 1.
        let arcs = roots_of("3*x^2 - 3*y^10", qi(12));
        assert_eq!(arcs.len(), 2);
        for ra in &arcs {
            let arc = &ra.arc;
            assert_eq!(arc.ram, 1);
            assert_eq!(arc.residual, XRat::Inf);
            assert_eq!(arc.terms.len(), 1);
            assert_eq!(arc.terms[0].0, qi(5));
        }
        let mut leads: Vec<Scalar> = arcs.iter().map(|a| a.arc.terms[0].1.clone()).collect();
        leads.sort_by(|a, b| a.canonical_cmp(b));
        assert!(leads[0].eq_exact(&Scalar::from_int(-1)));
        assert!(leads[1].eq_exact(&Scalar::one()));
    }

    #[test]
    fn frozen_expansion_of_two_parameter_polar() {
        // 3x^2 + 2xy^3 + y^7 (b = c = 1). Quadratic-formula oracle:
        // x = (-y^3 ± y^3 sqrt(1 - 3y)) / 3, sqrt(1-3y) = 1 - 3y/2 - 9y^2/8 - 27y^3/16 - ...
        // α = -(2/3)y^3 + (1/2)y^4 + (3/8)y^5 + (9/16)y^6 + ...
        // β =            -(1/2)y^4 - (3/8)y^5 - (9/16)y^6 - ...
        let arcs = roots_of("3*x^2 + 2*x*y^3 + y^7", qi(7));
        assert_eq!(arcs.len(), 2);
        let alpha = arcs
            .iter()
            .find(|a| a.arc.terms[0].0 == qi(3))
            .expect("arc with order 3");
        let beta = arcs
            .iter()
            .find(|a| a.arc.terms[0].0 == qi(4))
            .expect("arc with order 4");
        let a = &alpha.arc.terms;
        assert!(a[0].1.eq_exact(&Scalar::from_q(q(-2, 3))));
        assert!(a[1].1.eq_exact(&Scalar::from_q(q(1, 2))));
        assert!(a[2].1.eq_exact(&Scalar::from_q(q(3, 8))));
        assert!(a[3].1.eq_exact(&Scalar::from_q(q(9, 16))));
        let b = &beta.arc.terms;
        assert_eq!(b[0].0, qi(4));
        assert!(b[0].1.eq_exact(&Scalar::from_q(q(-1, 2))));
        assert!(b[1].1.eq_exact(&Scalar::from_q(q(-3, 8))));
        assert!(b[2].1.eq_exact(&Scalar::from_q(q(-9, 16))));
        assert!(alpha.arc.residual >= XRat::Fin(qi(7)));
        assert!(beta.arc.residual >= XRat::Fin(qi(7)));
    }

    #[test]
    fn ramified_cusp_root() {
        // x^2 - y^3: one class x = y^{3/2}, N = 2.
        let arcs = roots_of("x^2 - y^3", qi(6));
        assert_eq!(arcs.len(), 1);
        let arc = &arcs[0].arc;
        assert_eq!(arc.ram, 2);
        assert_eq!(arc.terms.len(), 1);
        assert_eq!(arc.terms[0].0, q(3, 2));
        assert_eq!(arc.residual, XRat::Inf);
        let conj = conjugates(arc, &opts()).unwrap();
        assert_eq!(conj.len(), 2);
        // The conjugate pair is {+y^{3/2}, -y^{3/2}} in some order.
        let mut leads: Vec<Scalar> = conj.iter().map(|c| c.terms[0].1.clone()).collect();
        leads.sort_by(|a, b| a.canonical_cmp(b));
        assert!(leads[0].eq_exact(&Scalar::from_int(-1)));
        assert!(leads[1].eq_exact(&Scalar::one()));
    }

    #[test]
    fn zero_arc_from_linear_polar() {
        // f_x = 2x for f = x^2 - y^3: the single arc is x ≡ 0.
        let arcs = roots_of("2*x", qi(5));
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].arc.terms.is_empty());
        assert_eq!(arcs[0].arc.residual, XRat::Inf);
        assert_eq!(arcs[0].arc.ram, 1);
    }

    #[test]
    fn residual_certificates_hold_by_substitution() {
        for (f, target) in [
            ("3*x^2 + 2*x*y^3 + y^7", qi(9)),
            ("x^3 + x*y^2 + y^4", qi(8)),
        ] {
            let fp = poly(f);
            for ra in roots_of(f, target.clone()) {
                let value = eval_along(&fp, &ra.arc.terms, &XRat::Fin(qi(64)));
                match value.leading_checked(&opts().eps()).unwrap() {
                    Some((e, _)) => assert!(e >= target, "residual violated for {f}"),
                    None => {} // exact root
                }
            }
        }
    }

    #[test]
    fn conjugate_closure_counts_roots() {
        // Σ over classes of N * mult = x-degree, when every root passes
        // through the origin.
        for f in ["x^2 - y^3", "3*x^2 - 3*y^10", "x^3 + x*y^2 + y^4", "x^2*y + x^3"] {
            let fp = poly(f);
            let arcs = puiseux_roots(&fp, &qi(4), &opts()).unwrap();
            let total: u32 = arcs.iter().map(|a| a.arc.ram * a.arc.mult).sum();
            assert_eq!(total, fp.deg_x().unwrap(), "{f}");
        }
    }

    #[test]
    fn conjugate_twists() {
        // x = y^{3/2} + y^2: twist flips the y^{3/2} term only.
        let arc = PuiseuxArc {
            terms: vec![(q(3, 2), Scalar::one()), (qi(2), Scalar::one())],
            ram: 2,
            residual: XRat::Inf,
            mult: 1,
            conj_class: 0,
            theta_index: 0,
        };
        let twisted = conjugate(&arc, 1, &opts()).unwrap();
        assert!(twisted.terms[0].1.eq_exact(&Scalar::from_int(-1)));
        assert!(twisted.terms[1].1.eq_exact(&Scalar::one()));
    }

    #[test]
    fn contact_orders_plain_and_starred() {
        let e = opts().eps();
        let mk = |terms: Vec<(Q, Scalar)>, ram: u32| PuiseuxArc {
            terms,
            ram,
            residual: XRat::Fin(qi(50)),
            mult: 1,
            conj_class: 0,
            theta_index: 0,
        };
        // y^5 vs -y^5 -> 5
        let a = mk(vec![(qi(5), Scalar::one())], 1);
        let b = mk(vec![(qi(5), Scalar::from_int(-1))], 1);
        assert_eq!(contact_order(&a, &b, &e).unwrap(), Contact::At(qi(5)));
        // arc vs itself -> indistinguishable at the residual
        assert_eq!(
            contact_order(&a, &a, &e).unwrap(),
            Contact::IndistinguishableAt(XRat::Fin(qi(50)))
        );
        // N = 1 starred reduces to the plain order.
        assert_eq!(contact_order_starred(&a, &b, &opts()).unwrap(), Contact::At(qi(5)));
        // y^{3/2}+y^2 vs y^{3/2}+2y^2: plain 2; starred also 2 (the twisted
        // pairing only reaches 3/2).
        let c = mk(vec![(q(3, 2), Scalar::one()), (qi(2), Scalar::one())], 2);
        let d = mk(vec![(q(3, 2), Scalar::one()), (qi(2), Scalar::from_int(2))], 2);
        assert_eq!(contact_order(&c, &d, &e).unwrap(), Contact::At(qi(2)));
        assert_eq!(contact_order_starred(&c, &d, &opts()).unwrap(), Contact::At(qi(2)));
        // y^{3/2} vs -y^{3/2}: same image, starred indistinguishable.
        let p = mk(vec![(q(3, 2), Scalar::one())], 2);
        let m = mk(vec![(q(3, 2), Scalar::from_int(-1))], 2);
        assert!(matches!(
            contact_order_starred(&p, &m, &opts()).unwrap(),
            Contact::IndistinguishableAt(_)
        ));
        // plain <= starred always.
        assert_eq!(contact_order(&p, &m, &e).unwrap(), Contact::At(q(3, 2)));
    }

    #[test]
    fn compose_germ_exact_polynomial_arc() {
        // f of the cusp family along y^5: y^12 - 2y^15 exactly, window inf.
        let f = poly("x^3 - 3*x*y^10 + y^12");
        let fx = poly("3*x^2 - 3*y^10");
        let mut arcs = puiseux_roots(&fx, &qi(5), &opts()).unwrap();
        let plus = arcs
            .iter_mut()
            .find(|a| a.arc.terms[0].1.eq_exact(&Scalar::one()))
            .unwrap();
        let exp = compose_germ(&f, plus, &qi(17), &opts()).unwrap();
        assert!(exp.window >= XRat::Fin(qi(17)));
        assert_eq!(exp.terms.len(), 2);
        assert_eq!(exp.terms[0].0, qi(12));
        assert!(exp.terms[0].1.eq_exact(&Scalar::one()));
        assert_eq!(exp.terms[1].0, qi(15));
        assert!(exp.terms[1].1.eq_exact(&Scalar::from_int(-2)));
    }

    #[test]
    fn compose_germ_with_truncated_arc() {
        // f (b=c=1) along α and β with window 11:
        // f(α) = (31/27) y^9 - (2/3) y^10 + ..., f(β) = y^9 + 0*y^10 + ...
        let f = poly("x^3 + x^2*y^3 + y^9 + x*y^7");
        let fx = poly("3*x^2 + 2*x*y^3 + y^7");
        let mut arcs = puiseux_roots(&fx, &qi(5), &opts()).unwrap();
        arcs.sort_by(|a, b| a.arc.terms[0].0.cmp(&b.arc.terms[0].0));
        let (first, second) = arcs.split_at_mut(1);
        let alpha = &mut first[0];
        let beta = &mut second[0];
        assert_eq!(alpha.arc.terms[0].0, qi(3));
        let ea = compose_germ(&f, alpha, &qi(11), &opts()).unwrap();
        assert!(ea.window >= XRat::Fin(qi(11)));
        assert!(ea.coeff_at(&qi(9)).eq_exact(&Scalar::from_q(q(31, 27))));
        assert!(ea.coeff_at(&qi(10)).eq_exact(&Scalar::from_q(q(-2, 3))));
        let eb = compose_germ(&f, beta, &qi(11), &opts()).unwrap();
        assert!(eb.coeff_at(&qi(9)).eq_exact(&Scalar::one()));
        assert!(eb.coeff_at(&qi(10)).is_exact_zero());
    }

    #[test]
    fn compose_windows_are_monotone() {
        let f = poly("x^3 + x^2*y^3 + y^9 + x*y^7");
        let fx = poly("3*x^2 + 2*x*y^3 + y^7");
        let mut arcs = puiseux_roots(&fx, &qi(5), &opts()).unwrap();
        let alpha = arcs.iter_mut().find(|a| a.arc.terms[0].0 == qi(3)).unwrap();
        let small = compose_germ(&f, alpha, &qi(11), &opts()).unwrap();
        let large = compose_germ(&f, alpha, &qi(14), &opts()).unwrap();
        for (e, c) in &small.terms {
            assert!(large.coeff_at(e).eq_exact(c), "coefficient changed at {e}");
        }
    }
}
