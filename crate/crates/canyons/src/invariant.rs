//! Assembly of the per-line invariant packets: leading data `(h0, a0)` over
//! tangential arcs, pair data `(m, ν)` across distinct canyons, and the full
//! multiset over the singular cone lines, together with the `ℂ*` rescaling
//! action.

use crate::config::Options;
use crate::error::{Error, Result};
use crate::polar::{polar_arcs, sigma_line_index, PolarAnalysis};
use crate::poly::BivarPoly;
use crate::puiseux::{compose_germ, contact_order, Contact, GermExpansion};
use crate::ratio::{fmt_q, Q, XRat};
use crate::scalar::{Scalar, ZeroTest};
use num_bigint::BigInt;
use num_traits::One;

/// Pair data for an ordered pair of polar arcs tangent to the same line:
/// `m` is the first exponent where the normalized expansions differ inside
/// the window `[h0, h0 + δ - 1)`, and `ν` the coefficient difference there.
#[derive(Debug, Clone)]
pub struct PairData {
    pub alpha_id: usize,
    pub beta_id: usize,
    /// Common leading exponent h0.
    pub l0: Q,
    /// Plain contact order of the two arcs.
    pub delta: Q,
    pub m: Q,
    pub nu: Scalar,
}

/// Why a pair of arcs contributes no pair data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairExclusion {
    ContactNotAboveOne,
    SameCanyon,
    LeadingExponentsDiffer,
    NoDifferenceInWindow,
}

#[derive(Debug, Clone)]
pub struct LeadingEntry {
    pub h0: Q,
    pub a0: Scalar,
    pub mult: u32,
    pub arc_id: usize,
}

/// The packet attached to one singular cone line.
#[derive(Debug, Clone)]
pub struct DeltaL {
    pub lambda: Scalar,
    pub leading: Vec<LeadingEntry>,
    pub pairs: Vec<PairData>,
}

/// The invariant: one packet per line of Σ_f, plus the germ multiplicity
/// (reported, not compared).
#[derive(Debug)]
pub struct Inv2 {
    pub packets: Vec<DeltaL>,
    pub k: u32,
}

/// Pair data for two decorated arcs, or the reason the pair is excluded.
pub fn pair_data(
    f: &BivarPoly,
    analysis: &mut PolarAnalysis,
    alpha_id: usize,
    beta_id: usize,
    opts: &Options,
) -> Result<std::result::Result<PairData, PairExclusion>> {
    let eps = opts.eps();
    let (a_canyon, b_canyon) = (analysis.arcs[alpha_id].canyon, analysis.arcs[beta_id].canyon);
    if a_canyon == b_canyon {
        return Ok(Err(PairExclusion::SameCanyon));
    }
    let (h0_a, h0_b) = (analysis.arcs[alpha_id].h0.clone(), analysis.arcs[beta_id].h0.clone());
    if h0_a != h0_b {
        return Ok(Err(PairExclusion::LeadingExponentsDiffer));
    }
    let delta = match contact_order(
        &analysis.arcs[alpha_id].arc,
        &analysis.arcs[beta_id].arc,
        &eps,
    )? {
        Contact::At(e) => e,
        Contact::IndistinguishableAt(_) => {
            // Distinct polar arcs cannot coincide; refine and retry once.
            refine_pair(f, analysis, alpha_id, beta_id, opts)?;
            match contact_order(
                &analysis.arcs[alpha_id].arc,
                &analysis.arcs[beta_id].arc,
                &eps,
            )? {
                Contact::At(e) => e,
                Contact::IndistinguishableAt(_) => return Err(Error::IndistinguishableArcs),
            }
        }
    };
    if delta <= Q::one() {
        return Ok(Err(PairExclusion::ContactNotAboveOne));
    }
    // Window bound: compare normalized coefficients strictly below
    // h0 + δ - 1.
    let bound = &h0_a + &delta - Q::one();
    let ea = expansion_with_window(f, analysis, alpha_id, &bound, opts)?;
    let eb = expansion_with_window(f, analysis, beta_id, &bound, opts)?;
    let a0 = ea
        .leading()
        .map(|(_, c)| c.clone())
        .ok_or(Error::MultipleRoot)?;
    let b0 = eb
        .leading()
        .map(|(_, c)| c.clone())
        .ok_or(Error::MultipleRoot)?;
    let a0_inv = a0.inv()?;
    let b0_inv = b0.inv()?;
    // Walk the merged exponent set in (h0, h0 + δ - 1).
    let mut exps: Vec<Q> = ea
        .terms
        .iter()
        .map(|(e, _)| e.clone())
        .chain(eb.terms.iter().map(|(e, _)| e.clone()))
        .filter(|e| e > &h0_a && e < &bound)
        .collect();
    exps.sort();
    exps.dedup();
    for e in exps {
        let ca = ea.coeff_at(&e).mul(&a0_inv);
        let cb = eb.coeff_at(&e).mul(&b0_inv);
        let nu = ca.sub(&cb);
        match nu.zero_test(&eps) {
            ZeroTest::NonZero => {
                return Ok(Ok(PairData {
                    alpha_id,
                    beta_id,
                    l0: h0_a,
                    delta,
                    m: e,
                    nu,
                }));
            }
            ZeroTest::Zero => continue,
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    Ok(Err(PairExclusion::NoDifferenceInWindow))
}

fn refine_pair(
    f: &BivarPoly,
    analysis: &mut PolarAnalysis,
    alpha_id: usize,
    beta_id: usize,
    opts: &Options,
) -> Result<()> {
    for id in [alpha_id, beta_id] {
        let class = analysis.arcs[id].arc.conj_class;
        let theta = analysis.arcs[id].arc.theta_index;
        let target = match &analysis.class_handles[class].arc.residual {
            XRat::Fin(r) => r + r + Q::one(),
            XRat::Inf => continue,
        };
        analysis.class_handles[class].ensure_residual(&target, opts)?;
        let refined = crate::puiseux::conjugate(&analysis.class_handles[class].arc, theta, opts)?;
        let old = &mut analysis.arcs[id].arc;
        let conj_class = old.conj_class;
        *old = crate::puiseux::PuiseuxArc { conj_class, ..refined };
    }
    let _ = f;
    Ok(())
}

/// The stored expansion if its window suffices, else a recomposition at the
/// required window (twisted to the arc's conjugate index).
fn expansion_with_window(
    f: &BivarPoly,
    analysis: &mut PolarAnalysis,
    arc_id: usize,
    required: &Q,
    opts: &Options,
) -> Result<GermExpansion> {
    if analysis.arcs[arc_id].expansion.window >= XRat::Fin(required.clone()) {
        return Ok(analysis.arcs[arc_id].expansion.clone());
    }
    let class = analysis.arcs[arc_id].arc.conj_class;
    let theta = analysis.arcs[arc_id].arc.theta_index;
    let handle = &mut analysis.class_handles[class];
    let rep_expansion = compose_germ(f, handle, required, opts)?;
    let n = handle.arc.ram.max(1);
    twist_germ_expansion(&rep_expansion, n, theta, opts)
}

fn twist_germ_expansion(
    expansion: &GermExpansion,
    n: u32,
    j: u32,
    opts: &Options,
) -> Result<GermExpansion> {
    if n <= 1 || j % n == 0 {
        return Ok(expansion.clone());
    }
    let mut terms = Vec::with_capacity(expansion.terms.len());
    for (e, c) in &expansion.terms {
        let nh = (e * Q::from_integer(BigInt::from(n))).to_integer();
        let power = num_integer::Integer::mod_floor(&(nh * BigInt::from(j)), &BigInt::from(n));
        let theta = Scalar::unity_root(n, num_traits::ToPrimitive::to_i64(&power).unwrap_or(0), opts.precision)?;
        terms.push((e.clone(), c.mul(&theta)));
    }
    Ok(GermExpansion { terms, window: expansion.window.clone() })
}

/// Assemble the packet of one singular line from the arcs tangent to it.
pub fn delta_l(
    f: &BivarPoly,
    analysis: &mut PolarAnalysis,
    line_index: usize,
    opts: &Options,
) -> Result<DeltaL> {
    let lambda = analysis.sigma_lines[line_index].clone();
    let mut members: Vec<usize> = Vec::new();
    for arc in &analysis.arcs {
        if !arc.is_tangential {
            continue;
        }
        if sigma_line_index(&arc.tangent_lambda, &analysis.sigma_lines, opts)? == Some(line_index) {
            members.push(arc.id);
        }
    }
    let leading: Vec<LeadingEntry> = members
        .iter()
        .map(|&id| {
            let arc = &analysis.arcs[id];
            LeadingEntry {
                h0: arc.h0.clone(),
                a0: arc.a0.clone(),
                mult: arc.arc.mult,
                arc_id: id,
            }
        })
        .collect();
    let mut pairs = Vec::new();
    for &a in &members {
        for &b in &members {
            if a == b {
                continue;
            }
            if let Ok(data) = pair_data(f, analysis, a, b, opts)? {
                pairs.push(data);
            }
        }
    }
    pairs.sort_by(|p, q| {
        p.alpha_id
            .cmp(&q.alpha_id)
            .then_with(|| p.beta_id.cmp(&q.beta_id))
    });
    Ok(DeltaL { lambda, leading, pairs })
}

/// The full invariant of a germ: one packet per singular cone line.
pub fn inv2(f: &BivarPoly, opts: &Options) -> Result<Inv2> {
    let mut analysis = polar_arcs(f, opts)?;
    inv2_from_analysis(f, &mut analysis, opts)
}

/// Invariant assembly over an existing polar analysis.
pub fn inv2_from_analysis(
    f: &BivarPoly,
    analysis: &mut PolarAnalysis,
    opts: &Options,
) -> Result<Inv2> {
    let k = analysis.cone.k;
    let line_count = analysis.sigma_lines.len();
    // Packets share the arc-refinement state, so assembly is sequential; the
    // parallel work happens inside the polar stage.
    let mut packets = Vec::with_capacity(line_count);
    for line in 0..line_count {
        packets.push(delta_l(f, analysis, line, opts)?);
    }
    Ok(Inv2 { packets, k })
}

/// The `ℂ*` action on a packet: leading coefficients pick up `c^{h0}`, pair
/// coefficients `c^{m - l0}`. Principal branch for fractional exponents.
pub fn cstar_transform(d: &DeltaL, c: &Scalar, opts: &Options) -> Result<DeltaL> {
    let mut leading = Vec::with_capacity(d.leading.len());
    for entry in &d.leading {
        let factor = c.pow_q(&entry.h0, opts.precision)?;
        leading.push(LeadingEntry {
            h0: entry.h0.clone(),
            a0: entry.a0.mul(&factor),
            mult: entry.mult,
            arc_id: entry.arc_id,
        });
    }
    let mut pairs = Vec::with_capacity(d.pairs.len());
    for p in &d.pairs {
        let e = &p.m - &p.l0;
        let factor = c.pow_q(&e, opts.precision)?;
        pairs.push(PairData {
            alpha_id: p.alpha_id,
            beta_id: p.beta_id,
            l0: p.l0.clone(),
            delta: p.delta.clone(),
            m: p.m.clone(),
            nu: p.nu.mul(&factor),
        });
    }
    Ok(DeltaL { lambda: d.lambda.clone(), leading, pairs })
}

impl DeltaL {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.lambda,
            "leading": self.leading.iter().map(|l| serde_json::json!({
                "h0": fmt_q(&l.h0),
                "a0": l.a0,
                "mult": l.mult,
            })).collect::<Vec<_>>(),
            "pairs": self.pairs.iter().map(|p| serde_json::json!({
                "l0": fmt_q(&p.l0),
                "m": fmt_q(&p.m),
                "nu": p.nu,
                "alpha": p.alpha_id,
                "beta": p.beta_id,
            })).collect::<Vec<_>>(),
        })
    }
}

impl Inv2 {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lines": self.packets.iter().map(DeltaL::to_json).collect::<Vec<_>>(),
            "k": self.k,
        })
    }
}
