//! Decide whether two invariants can be identified by the `ℂ*` rescaling
//! action: per-line witness constants, then aggregation over line matchings.
//!
//! Fractional exponents are handled through `u`, a D-th root of the constant
//! `c` (D = lcm of the exponent denominators), so every constraint becomes a
//! polynomial one: `u^{D e} = ratio`. The anchor class with the fewest
//! candidates bounds the enumeration; every candidate is then checked by
//! perfect matchings on all classes.

use crate::config::Options;
use crate::error::{Error, Result};
use crate::invariant::{DeltaL, Inv2};
use crate::ratio::{fmt_q, lcm_denoms, Q};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    NotEquivalent,
    ConsistentWithEquivalence,
}

#[derive(Debug, Clone)]
pub struct Witness {
    /// Pairs (packet index in the first invariant, index in the second).
    pub line_map: Vec<(usize, usize)>,
    /// Per line, the surviving constants `c` (at least one each).
    pub candidates: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone)]
pub struct Refutation {
    pub line_pair: (usize, usize),
    pub constraints: Vec<String>,
}

#[derive(Debug)]
pub struct EquivalenceReport {
    pub decision: Decision,
    pub witnesses: Vec<Witness>,
    pub refutations: Vec<Refutation>,
    pub warnings: Vec<String>,
}

/// One constraint class: all elements share the exponent `e` acting as
/// `value -> value * c^e`.
struct ConstraintClass {
    exponent: Q,
    label: String,
    src: Vec<Scalar>,
    tgt: Vec<Scalar>,
}

fn classes_of(d1: &DeltaL, d2: &DeltaL) -> Option<Vec<ConstraintClass>> {
    use std::collections::BTreeMap;
    // Leading data grouped by h0 (multiplicities expanded).
    let mut lead: BTreeMap<Q, (Vec<Scalar>, Vec<Scalar>)> = BTreeMap::new();
    for entry in &d1.leading {
        let slot = lead.entry(entry.h0.clone()).or_default();
        for _ in 0..entry.mult.max(1) {
            slot.0.push(entry.a0.clone());
        }
    }
    for entry in &d2.leading {
        let slot = lead.entry(entry.h0.clone()).or_default();
        for _ in 0..entry.mult.max(1) {
            slot.1.push(entry.a0.clone());
        }
    }
    // Pair data grouped by (l0, m); the action exponent is m - l0.
    let mut pairs: BTreeMap<(Q, Q), (Vec<Scalar>, Vec<Scalar>)> = BTreeMap::new();
    for p in &d1.pairs {
        pairs
            .entry((p.l0.clone(), p.m.clone()))
            .or_default()
            .0
            .push(p.nu.clone());
    }
    for p in &d2.pairs {
        pairs
            .entry((p.l0.clone(), p.m.clone()))
            .or_default()
            .1
            .push(p.nu.clone());
    }
    let mut out = Vec::new();
    for (h0, (src, tgt)) in lead {
        if src.len() != tgt.len() {
            return None; // signature mismatch
        }
        out.push(ConstraintClass {
            label: format!("c^{}", fmt_q(&h0)),
            exponent: h0,
            src,
            tgt,
        });
    }
    for ((l0, m), (src, tgt)) in pairs {
        if src.len() != tgt.len() {
            return None;
        }
        let e = &m - &l0;
        out.push(ConstraintClass {
            label: format!("c^{}", fmt_q(&e)),
            exponent: e,
            src,
            tgt,
        });
    }
    Some(out)
}

/// Human-readable constraint set for refutation certificates.
fn constraint_strings(classes: &[ConstraintClass]) -> Vec<String> {
    classes
        .iter()
        .map(|class| {
            let mut ratios: Vec<String> = Vec::new();
            for v1 in &class.src {
                for v2 in &class.tgt {
                    if let Ok(r) = v2.div(v1) {
                        let s = r.to_display_string();
                        if !ratios.contains(&s) {
                            ratios.push(s);
                        }
                    }
                }
            }
            if ratios.len() == 1 {
                format!("{} = {}", class.label, ratios[0])
            } else {
                format!("{} in {{{}}}", class.label, ratios.join(", "))
            }
        })
        .collect()
}

/// `|v2 - v1 * factor| <= tol * max(1, |v1|)`, decided exactly where
/// possible; `None` when radii straddle the threshold.
fn matches_within(v1: &Scalar, v2: &Scalar, factor: &Scalar, tol: &Q) -> Option<bool> {
    let shifted = v1.mul(factor);
    let diff = v2.sub(&shifted);
    // Exact values decide by exact squared comparison (zero slack).
    if let (Some(dsq), Some(vsq)) = (diff.abs_sq_exact(), v1.abs_sq_exact()) {
        let msq = if vsq > Q::one() { vsq } else { Q::one() };
        return Some(dsq <= tol * tol * msq);
    }
    let (lo, hi) = diff.abs_bounds_q();
    let (v1lo, v1hi) = v1.abs_bounds_q();
    let thr_low = tol * if v1lo > Q::one() { v1lo } else { Q::one() };
    let thr_high = tol * if v1hi > Q::one() { v1hi } else { Q::one() };
    if hi <= thr_low {
        Some(true)
    } else if lo > thr_high {
        Some(false)
    } else {
        None
    }
}

/// Kuhn's augmenting-path perfect matching on a small bipartite adjacency.
fn has_perfect_matching(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    if n == 0 {
        return true;
    }
    fn augment(
        u: usize,
        adj: &[Vec<bool>],
        seen: &mut [bool],
        match_to: &mut [Option<usize>],
    ) -> bool {
        for v in 0..adj.len() {
            if adj[u][v] && !seen[v] {
                seen[v] = true;
                if match_to[v].is_none() || augment(match_to[v].unwrap(), adj, seen, match_to) {
                    match_to[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut match_to: Vec<Option<usize>> = vec![None; n];
    for u in 0..n {
        let mut seen = vec![false; n];
        if !augment(u, adj, &mut seen, &mut match_to) {
            return false;
        }
    }
    true
}

/// Witness constants identifying two packets, possibly empty. The signature
/// precheck (multisets of exponents) runs first; candidates for the D-th
/// root `u` of `c` are enumerated from the anchor class.
pub fn delta_equivalent(
    d1: &DeltaL,
    d2: &DeltaL,
    tol: &Q,
    opts: &Options,
) -> Result<Vec<Scalar>> {
    let classes = match classes_of(d1, d2) {
        Some(c) => c,
        None => return Ok(Vec::new()),
    };
    if classes.is_empty() {
        return Ok(vec![Scalar::one()]);
    }
    let d = lcm_denoms(classes.iter().map(|c| &c.exponent)).ok_or(Error::ExplosionGuard)? as i64;
    let int_exp = |e: &Q| -> Result<u32> {
        (e * Q::from_integer(BigInt::from(d)))
            .to_integer()
            .to_u32()
            .ok_or(Error::ExplosionGuard)
    };
    // Anchor: the class minimizing |src| * |tgt| * (D * e).
    let mut anchor = 0usize;
    let mut best = u64::MAX;
    for (idx, class) in classes.iter().enumerate() {
        let k = int_exp(&class.exponent)? as u64;
        let cost = class.src.len() as u64 * class.tgt.len() as u64 * k.max(1);
        if cost < best {
            best = cost;
            anchor = idx;
        }
    }
    // Enumerate u candidates from the anchor ratios.
    let anchor_class = &classes[anchor];
    let k_anchor = int_exp(&anchor_class.exponent)?;
    let mut candidates: Vec<Scalar> = Vec::new();
    for v1 in &anchor_class.src {
        for v2 in &anchor_class.tgt {
            let ratio = v2.div(v1)?;
            for root in ratio.kth_roots(k_anchor.max(1), opts.precision)? {
                candidates.push(root);
            }
        }
    }
    // Explosion guard on the total matching workload.
    let matching_cost: u64 = classes
        .iter()
        .map(|c| (c.src.len() * c.src.len()) as u64 + 1)
        .sum();
    if candidates.len() as u64 * matching_cost > 1_000_000 {
        return Err(Error::ExplosionGuard);
    }
    let mut witnesses: Vec<Scalar> = Vec::new();
    'candidate: for u in candidates {
        for class in &classes {
            let k = int_exp(&class.exponent)?;
            let factor = u.pow_i64(k as i64)?;
            let n = class.src.len();
            let mut adj = vec![vec![false; n]; n];
            for (i, v1) in class.src.iter().enumerate() {
                for (j, v2) in class.tgt.iter().enumerate() {
                    match matches_within(v1, v2, &factor, tol) {
                        Some(ok) => adj[i][j] = ok,
                        None => return Err(Error::PrecisionExhausted),
                    }
                }
            }
            if !has_perfect_matching(&adj) {
                continue 'candidate;
            }
        }
        let c = u.pow_i64(d)?;
        let duplicate = witnesses.iter().any(|w| {
            matches!(matches_within(&Scalar::one(), &c, w, tol), Some(true))
        });
        if !duplicate {
            witnesses.push(c);
        }
    }
    Ok(witnesses)
}

/// Constraint strings for a failed packet pairing (refutation certificate).
pub fn delta_constraints(d1: &DeltaL, d2: &DeltaL) -> Vec<String> {
    match classes_of(d1, d2) {
        Some(classes) => constraint_strings(&classes),
        None => vec!["exponent signatures differ".into()],
    }
}

/// Decide whether two invariants are identified by the action: try every
/// bijection between the packet lists; constants may differ across lines.
pub fn inv2_equivalent(i1: &Inv2, i2: &Inv2, tol: &Q, opts: &Options) -> Result<EquivalenceReport> {
    let mut warnings = Vec::new();
    if i1.k != i2.k {
        warnings.push(format!(
            "germ multiplicities differ (k = {} vs {}): not part of the invariant",
            i1.k, i2.k
        ));
    }
    if i1.packets.len() != i2.packets.len() {
        return Ok(EquivalenceReport {
            decision: Decision::NotEquivalent,
            witnesses: Vec::new(),
            refutations: vec![Refutation {
                line_pair: (usize::MAX, usize::MAX),
                constraints: vec![format!(
                    "singular line counts differ: {} vs {}",
                    i1.packets.len(),
                    i2.packets.len()
                )],
            }],
            warnings,
        });
    }
    let n = i1.packets.len();
    // Witness sets per packet pair, computed once.
    let mut cache: Vec<Vec<Vec<Scalar>>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(delta_equivalent(&i1.packets[i], &i2.packets[j], tol, opts)?);
        }
        cache.push(row);
    }
    let mut witnesses = Vec::new();
    let mut failed_pairs: Vec<(usize, usize)> = Vec::new();
    for perm in permutations(n) {
        let mut line_map = Vec::with_capacity(n);
        let mut candidates = Vec::with_capacity(n);
        let mut ok = true;
        for (i, &j) in perm.iter().enumerate() {
            let wits = &cache[i][j];
            if wits.is_empty() {
                if !failed_pairs.contains(&(i, j)) {
                    failed_pairs.push((i, j));
                }
                ok = false;
                break;
            }
            line_map.push((i, j));
            candidates.push(wits.clone());
        }
        if ok {
            witnesses.push(Witness { line_map, candidates });
        }
    }
    let decision = if witnesses.is_empty() {
        Decision::NotEquivalent
    } else {
        Decision::ConsistentWithEquivalence
    };
    let refutations = failed_pairs
        .into_iter()
        .map(|(i, j)| Refutation {
            line_pair: (i, j),
            constraints: delta_constraints(&i1.packets[i], &i2.packets[j]),
        })
        .collect();
    Ok(EquivalenceReport { decision, witnesses, refutations, warnings })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}

impl EquivalenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "decision": match self.decision {
                Decision::NotEquivalent => "NotEquivalent",
                Decision::ConsistentWithEquivalence => "ConsistentWithEquivalence",
            },
            "witnesses": self.witnesses.iter().map(|w| serde_json::json!({
                "line_map": w.line_map,
                "c": w.candidates.iter().map(|cands| cands.first().cloned())
                    .collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "refutations": self.refutations.iter().map(|r| serde_json::json!({
                "line_pair": [r.line_pair.0, r.line_pair.1],
                "constraints": r.constraints,
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }

    /// Scan every witness for a constant within `tol` of `expected`.
    pub fn find_witness_near(&self, expected: &Scalar, tol: &Q) -> Option<Scalar> {
        for w in &self.witnesses {
            for cands in &w.candidates {
                for c in cands {
                    if matches!(matches_within(&Scalar::one(), c, expected, tol), Some(true)) {
                        return Some(c.clone());
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::inv2;
    use crate::poly::parse_poly;
    use crate::ratio::q;
    use crate::scalar::Scalar;
    use std::collections::BTreeMap;

    fn opts() -> Options {
        Options::default()
    }

    fn tol() -> Q {
        opts().tol()
    }

    fn family(text: &str, params: &[(&str, i64)]) -> crate::poly::BivarPoly {
        let map: BTreeMap<String, Scalar> = params
            .iter()
            .map(|(k, v)| (k.to_string(), Scalar::from_int(*v)))
            .collect();
        parse_poly(text, &map).unwrap()
    }

    const CUSP: &str = "x^3 - 3*t^2*x*y^10 + y^12";
    const TWOPAR: &str = "x^3 + b*x^2*y^3 + y^9 + c*x*y^7";

    #[test]
    fn packet_vs_itself_has_witness_one() {
        let f = family(CUSP, &[("t", 1)]);
        let inv = inv2(&f, &opts()).unwrap();
        let wits = delta_equivalent(&inv.packets[0], &inv.packets[0], &tol(), &opts()).unwrap();
        assert!(wits.iter().any(|w| w.eq_exact(&Scalar::one())));
    }

    #[test]
    fn cusp_family_t1_vs_t2_is_refuted() {
        // c^12 = 1 forces |c| = 1; c^3 in {8, -8} forces |c| = 2.
        let f1 = family(CUSP, &[("t", 1)]);
        let f2 = family(CUSP, &[("t", 2)]);
        let i1 = inv2(&f1, &opts()).unwrap();
        let i2 = inv2(&f2, &opts()).unwrap();
        let wits = delta_equivalent(&i1.packets[0], &i2.packets[0], &tol(), &opts()).unwrap();
        assert!(wits.is_empty());
        let constraints = delta_constraints(&i1.packets[0], &i2.packets[0]);
        assert!(constraints.iter().any(|c| c == "c^12 = 1"), "{constraints:?}");
        assert!(
            constraints.iter().any(|c| c.starts_with("c^3 in {") && c.contains('8')),
            "{constraints:?}"
        );
        let report = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        assert_eq!(report.decision, Decision::NotEquivalent);
        assert!(!report.refutations.is_empty());
    }

    #[test]
    fn scaled_germ_recovers_witness_two() {
        let f = family(CUSP, &[("t", 1)]);
        let scaled = f.scale(&Scalar::from_int(2)).unwrap();
        let i1 = inv2(&f, &opts()).unwrap();
        let i2 = inv2(&scaled, &opts()).unwrap();
        let report = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        assert_eq!(report.decision, Decision::ConsistentWithEquivalence);
        let w = report
            .find_witness_near(&Scalar::from_int(2), &tol())
            .expect("witness near 2");
        let (_, hi) = w.sub(&Scalar::from_int(2)).abs_bounds_q();
        assert!(hi <= tol());
    }

    #[test]
    fn two_parameter_families_generically_distinct() {
        let f1 = family(TWOPAR, &[("b", 1), ("c", 1)]);
        let f2 = family(TWOPAR, &[("b", 2), ("c", 1)]);
        let i1 = inv2(&f1, &opts()).unwrap();
        let i2 = inv2(&f2, &opts()).unwrap();
        // Parametric sanity at (2, 1): a0 = (4/27)b^3 + 1 = 59/27 and
        // ν = ∓18bc/(4b^3+27) = ∓36/59.
        let p2 = &i2.packets[0];
        assert!(p2.leading.iter().any(|l| l.a0.eq_exact(&Scalar::from_q(q(59, 27)))));
        assert!(p2.pairs.iter().any(|p| p.nu.eq_exact(&Scalar::from_q(q(-36, 59)))));
        let report = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        assert_eq!(report.decision, Decision::NotEquivalent);
        // The anchor class is the pair class (one first root per ratio):
        // c = ±62/59 candidates fail the c^9 leading constraints.
        let constraints = delta_constraints(&i1.packets[0], &i2.packets[0]);
        let pair_constraint = constraints.iter().find(|c| c.starts_with("c^1 ")).unwrap();
        assert!(pair_constraint.contains("62/59"), "{pair_constraint}");
        let lead_constraint = constraints.iter().find(|c| c.starts_with("c^9 ")).unwrap();
        assert!(
            lead_constraint.contains("59/31") && lead_constraint.contains("27/31"),
            "{lead_constraint}"
        );
    }

    #[test]
    fn multiplicity_mismatch_warns_but_packets_decide() {
        let f1 = parse_poly("x^2 - y^3", &Default::default()).unwrap();
        let f2 = family(CUSP, &[("t", 1)]);
        let i1 = inv2(&f1, &opts()).unwrap();
        let i2 = inv2(&f2, &opts()).unwrap();
        let report = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        assert_eq!(report.decision, Decision::NotEquivalent);
        assert!(report.warnings.iter().any(|w| w.contains("multiplicities differ")));
    }

    #[test]
    fn empty_invariants_are_vacuously_consistent() {
        let f = parse_poly("x^2 + y^2", &Default::default()).unwrap();
        let i1 = inv2(&f, &opts()).unwrap();
        let i2 = inv2(&f, &opts()).unwrap();
        let report = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        assert_eq!(report.decision, Decision::ConsistentWithEquivalence);
        assert_eq!(report.witnesses.len(), 1);
        assert!(report.witnesses[0].line_map.is_empty());
    }

    #[test]
    fn shear_is_consistent_with_witness_one() {
        let f = family(CUSP, &[("t", 1)]);
        let sheared = f.shear(&Scalar::one());
        let i1 = inv2(&f, &opts()).unwrap();
        let i2 = inv2(&sheared, &opts()).unwrap();
        let report = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        assert_eq!(report.decision, Decision::ConsistentWithEquivalence);
        assert!(report.find_witness_near(&Scalar::one(), &tol()).is_some());
    }

    #[test]
    fn reflexivity_and_symmetry() {
        let f1 = family(TWOPAR, &[("b", 1), ("c", 1)]);
        let f2 = family(TWOPAR, &[("b", 2), ("c", 1)]);
        let i1 = inv2(&f1, &opts()).unwrap();
        let i2 = inv2(&f2, &opts()).unwrap();
        let fwd = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        let bwd = inv2_equivalent(&i2, &i1, &tol(), &opts()).unwrap();
        assert_eq!(fwd.decision, bwd.decision);
        let refl = inv2_equivalent(&i1, &i1, &tol(), &opts()).unwrap();
        assert_eq!(refl.decision, Decision::ConsistentWithEquivalence);
        assert!(refl.find_witness_near(&Scalar::one(), &tol()).is_some());
    }

    #[test]
    fn witnesses_invert_under_swap() {
        let f = family(CUSP, &[("t", 1)]);
        let scaled = f.scale(&Scalar::from_int(2)).unwrap();
        let i1 = inv2(&f, &opts()).unwrap();
        let i2 = inv2(&scaled, &opts()).unwrap();
        let fwd = inv2_equivalent(&i1, &i2, &tol(), &opts()).unwrap();
        let bwd = inv2_equivalent(&i2, &i1, &tol(), &opts()).unwrap();
        assert!(fwd.find_witness_near(&Scalar::from_int(2), &tol()).is_some());
        assert!(bwd
            .find_witness_near(&Scalar::from_q(q(1, 2)), &tol())
            .is_some());
    }
}
