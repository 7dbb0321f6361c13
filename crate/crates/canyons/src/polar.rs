//! Polar arcs of a germ, gradient degrees via the shifted-support method,
//! tangency against the singular cone lines, and the gradient-canyon
//! partition.

use crate::config::Options;
use crate::error::{Error, Result};
use crate::par::par_map;
use crate::poly::{mini_regular_check, squarefree_check, tangent_cone, BivarPoly, TangentCone};
use crate::puiseux::{
    compose_germ, conjugate, contact_order_starred, puiseux_roots, Contact, GermExpansion,
    PuiseuxArc, RefinableArc,
};
use crate::ratio::{Q, XRat};
use crate::scalar::{Scalar, ZeroTest};
use crate::series::FracPoly;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

/// A polar arc decorated with its invariant-bearing data.
#[derive(Debug, Clone)]
pub struct PolarArc {
    pub id: usize,
    pub arc: PuiseuxArc,
    /// Gradient degree of the arc (and of its canyon).
    pub d_gr: Q,
    /// λ of the tangent line `x = λ y`.
    pub tangent_lambda: Scalar,
    pub is_tangential: bool,
    /// Leading exponent of `f` along the arc.
    pub h0: Q,
    /// Leading coefficient of `f` along the arc.
    pub a0: Scalar,
    pub expansion: GermExpansion,
    /// Canyon id, filled by the partition.
    pub canyon: usize,
}

#[derive(Debug, Clone)]
pub struct Canyon {
    pub member_arc_ids: Vec<usize>,
    pub degree: Q,
}

/// Outcome of the polar stage: decorated arcs (conjugates enumerated as
/// distinct arcs), the canyon partition, and the cone data.
#[derive(Debug)]
pub struct PolarAnalysis {
    pub cone: TangentCone,
    pub sigma_lines: Vec<Scalar>,
    pub arcs: Vec<PolarArc>,
    pub canyons: Vec<Canyon>,
    /// One refinable handle per conjugacy class (index = class id).
    pub class_handles: Vec<RefinableArc>,
}

impl PolarAnalysis {
    pub fn arc(&self, id: usize) -> &PolarArc {
        &self.arcs[id]
    }
}

/// Full polar stage: mini-regularity and squarefree checks, Puiseux roots of
/// `∂f/∂x`, per-class decoration (gradient degree, tangency, leading data,
/// certified expansion), conjugate enumeration, canyon partition.
pub fn polar_arcs(f: &BivarPoly, opts: &Options) -> Result<PolarAnalysis> {
    if !mini_regular_check(f)? {
        return Err(Error::NotMiniRegular);
    }
    if !squarefree_check(f)? {
        return Err(Error::MultipleRoot);
    }
    let cone = tangent_cone(f, opts)?;
    let sigma_lines = cone.sigma_lines();
    let fx = f.partial_x();
    let classes = puiseux_roots(&fx, &Q::one(), opts)?;

    // Decorate each conjugacy class independently.
    let decorated: Vec<Result<ClassData>> = par_map(classes, opts, |mut handle| {
        decorate_class(f, &mut handle, opts).map(|d| (d, handle)).map(
            |(mut d, handle)| {
                d.handle = Some(handle);
                d
            },
        )
    });
    let mut class_data = Vec::with_capacity(decorated.len());
    for d in decorated {
        class_data.push(d?);
    }

    // Enumerate conjugates as distinct arcs, twisting the representative's
    // data exactly.
    let mut arcs: Vec<PolarArc> = Vec::new();
    let mut class_handles = Vec::with_capacity(class_data.len());
    for (class_id, data) in class_data.into_iter().enumerate() {
        let handle = data.handle.expect("handle present");
        let n = handle.arc.ram.max(1);
        for j in 0..n {
            let arc = conjugate(&handle.arc, j, opts)?;
            let expansion = twist_expansion(&data.expansion, n, j, opts)?;
            let (h0, a0) = leading_of(&expansion)?;
            let (tangent_lambda, is_tangential) =
                tangency_of_arc(&arc, &sigma_lines, opts)?;
            arcs.push(PolarArc {
                id: arcs.len(),
                arc: PuiseuxArc { conj_class: class_id, ..arc },
                d_gr: data.d_gr.clone(),
                tangent_lambda,
                is_tangential,
                h0,
                a0,
                expansion,
                canyon: usize::MAX,
            });
        }
        class_handles.push(handle);
    }

    let canyons = partition_canyons(&mut arcs, &class_handles, opts)?;
    Ok(PolarAnalysis { cone, sigma_lines, arcs, canyons, class_handles })
}

struct ClassData {
    d_gr: Q,
    expansion: GermExpansion,
    handle: Option<RefinableArc>,
}

fn decorate_class(
    f: &BivarPoly,
    handle: &mut RefinableArc,
    opts: &Options,
) -> Result<ClassData> {
    // Leading data first (also detects f(arc) ≡ 0). The first window can
    // fall short of h0 when the arc's initial certificate is small, so the
    // probe widens until a leading term shows up.
    let hard_cap = opts.window_cap(f.total_degree().unwrap_or(1))
        * Q::from_integer(BigInt::from(4));
    let mut required = Q::one();
    let h0 = loop {
        let probe = compose_germ(f, handle, &required, opts)?;
        match probe.leading() {
            Some((e, _)) => break e.clone(),
            None => match &probe.window {
                XRat::Inf => return Err(Error::MultipleRoot),
                XRat::Fin(w) => {
                    let next = (w + w).max(&required + &required);
                    if next > hard_cap {
                        return Err(Error::TruncationCapExceeded);
                    }
                    required = next;
                }
            },
        }
    };
    let d_gr = gradient_degree_of(f, handle, opts)?;
    // Window required by the pair construction: h0 + d_gr - 1.
    let window = &h0 + &d_gr - Q::one();
    let window = if window < h0 { h0.clone() } else { window };
    let expansion = compose_germ(f, handle, &window, opts)?;
    Ok(ClassData { d_gr, expansion, handle: None })
}

/// Gradient degree via the shifted-support method: with
/// `G1 = f_x(A + z, y)`, `G2 = f_y(A + z, y)` and `v0 = ord_y G2(0, y)`,
/// after refining until `ord_y G1(0, y) >= v0`, the degree is
/// `max(1, max over support (i, j), i >= 1, of (v0 - j) / i)`.
pub fn gradient_degree(f: &BivarPoly, arc: &PuiseuxArc, opts: &Options) -> Result<Q> {
    // Rebuild a handle for a bare arc (used by tests and the oracle).
    let fx = f.partial_x();
    let mut handle = RefinableArc::attach(arc.clone(), &fx);
    gradient_degree_of(f, &mut handle, opts)
}

fn gradient_degree_of(
    f: &BivarPoly,
    handle: &mut RefinableArc,
    opts: &Options,
) -> Result<Q> {
    let eps = opts.eps();
    let (fx, fy) = f.partials();
    let fx_poly = FracPoly::from_bivar(&fx);
    let fy_poly = FracPoly::from_bivar(&fy);
    let cap_base = opts.window_cap(f.total_degree().unwrap_or(1));
    let mut previous: Option<Q> = None;
    for _round in 0..24 {
        let cap = XRat::Fin(cap_base.clone());
        let g1 = fx_poly.shift(&handle.arc.terms, &cap);
        let g2 = fy_poly.shift(&handle.arc.terms, &cap);
        let v0 = match g2
            .col(0)
            .map(|c| c.ord_checked(&eps))
            .transpose()?
            .unwrap_or(XRat::Inf)
        {
            XRat::Fin(v) => v,
            XRat::Inf => {
                // grad f vanishes along the arc to all computed orders:
                // f(arc) ≡ const and the arc is a multiple root upstream.
                return Err(Error::MultipleRoot);
            }
        };
        // Residual guard: the pure-y column of G1 must be negligible.
        let w0 = g1
            .col(0)
            .map(|c| c.ord_checked(&eps))
            .transpose()?
            .unwrap_or(XRat::Inf);
        let guard_ok = w0 >= XRat::Fin(v0.clone());
        if guard_ok {
            let mut best = Q::one();
            for poly in [&g1, &g2] {
                for (i, col) in poly.cols.iter().enumerate().skip(1) {
                    if let Some((j, _)) = col.leading_checked(&eps)? {
                        let cand = (&v0 - &j) / Q::from_integer(BigInt::from(i as u32));
                        if cand > best {
                            best = cand;
                        }
                    }
                }
            }
            match &previous {
                Some(p) if p == &best => return Ok(best),
                _ => previous = Some(best),
            }
        } else {
            previous = None;
        }
        // Refine: push the residual past v0 (and once more for stability).
        let current_res = match &handle.arc.residual {
            XRat::Inf => {
                // Exact arc: the supports are final.
                if let Some(p) = previous {
                    return Ok(p);
                }
                return Err(Error::Internal("exact arc failed the residual guard".into()));
            }
            XRat::Fin(r) => r.clone(),
        };
        let mut target = &v0 + Q::one();
        if target <= current_res {
            target = &current_res + &current_res + Q::one();
        }
        handle.ensure_residual(&target, opts)?;
    }
    Err(Error::PrecisionExhausted)
}

/// Tangent-line data of an arc: λ of `x = λ y` (the leading coefficient for
/// order-1 arcs, zero otherwise), and whether that line lies in Σ_f.
pub fn tangency_of_arc(
    arc: &PuiseuxArc,
    sigma_lines: &[Scalar],
    opts: &Options,
) -> Result<(Scalar, bool)> {
    let eps = opts.eps();
    let lambda = match arc.terms.first() {
        Some((e, c)) if e == &Q::one() => c.clone(),
        _ => Scalar::zero(),
    };
    let mut tangential = false;
    for line in sigma_lines {
        match lambda.sub(line).zero_test(&eps) {
            ZeroTest::Zero => {
                tangential = true;
                break;
            }
            ZeroTest::NonZero => continue,
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    Ok((lambda, tangential))
}

/// Index of the Σ_f line an arc is tangent to, if any.
pub fn sigma_line_index(
    lambda: &Scalar,
    sigma_lines: &[Scalar],
    opts: &Options,
) -> Result<Option<usize>> {
    let eps = opts.eps();
    for (idx, line) in sigma_lines.iter().enumerate() {
        match lambda.sub(line).zero_test(&eps) {
            ZeroTest::Zero => return Ok(Some(idx)),
            ZeroTest::NonZero => continue,
            ZeroTest::Unknown => return Err(Error::PrecisionExhausted),
        }
    }
    Ok(None)
}

/// Partition the arcs into gradient canyons: same degree and starred contact
/// at least the degree. Transitivity (the ultrametric property) is verified.
fn partition_canyons(
    arcs: &mut [PolarArc],
    class_handles: &[RefinableArc],
    opts: &Options,
) -> Result<Vec<Canyon>> {
    let n = arcs.len();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut canyons: Vec<Canyon> = Vec::new();
    for i in 0..n {
        if assigned[i].is_some() {
            continue;
        }
        let id = canyons.len();
        let mut members = vec![i];
        assigned[i] = Some(id);
        for j in i + 1..n {
            if assigned[j].is_some() || arcs[i].d_gr != arcs[j].d_gr {
                continue;
            }
            if same_canyon(&arcs[i], &arcs[j], class_handles, opts)? {
                assigned[j] = Some(id);
                members.push(j);
            }
        }
        canyons.push(Canyon { member_arc_ids: members, degree: arcs[i].d_gr.clone() });
    }
    // Ultrametric check: members must be pairwise in contact >= degree.
    for canyon in &canyons {
        for (ai, a) in canyon.member_arc_ids.iter().enumerate() {
            for b in canyon.member_arc_ids.iter().skip(ai + 1) {
                if !same_canyon(&arcs[*a], &arcs[*b], class_handles, opts)? {
                    return Err(Error::Internal(
                        "canyon partition violated transitivity".into(),
                    ));
                }
            }
        }
    }
    for arc in arcs.iter_mut() {
        arc.canyon = assigned[arc.id].expect("all arcs assigned");
    }
    Ok(canyons)
}

fn same_canyon(
    a: &PolarArc,
    b: &PolarArc,
    class_handles: &[RefinableArc],
    opts: &Options,
) -> Result<bool> {
    debug_assert_eq!(a.d_gr, b.d_gr);
    let d = XRat::Fin(a.d_gr.clone());
    match contact_order_starred(&a.arc, &b.arc, opts)? {
        Contact::At(e) => Ok(XRat::Fin(e) >= d),
        Contact::IndistinguishableAt(limit) => {
            if limit >= d {
                return Ok(true);
            }
            // Separated branches always differ at a stored term, so an
            // undecided finite limit can only mean the truncations are stale.
            let _ = class_handles;
            Err(Error::IndistinguishableArcs)
        }
    }
}

fn leading_of(expansion: &GermExpansion) -> Result<(Q, Scalar)> {
    match expansion.leading() {
        Some((e, c)) => Ok((e.clone(), c.clone())),
        None => Err(Error::MultipleRoot),
    }
}

/// Twist a germ expansion to the `j`-th conjugate: the coefficient of `y^h`
/// picks up `θ^{j N h}`.
fn twist_expansion(
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
        let power = (nh * BigInt::from(j))
            .mod_floor(&BigInt::from(n))
            .to_i64()
            .unwrap_or(0);
        let theta = Scalar::unity_root(n, power, opts.precision)?;
        terms.push((e.clone(), c.mul(&theta)));
    }
    Ok(GermExpansion { terms, window: expansion.window.clone() })
}

impl RefinableArc {
    /// Attach a bare arc to its defining polynomial (for oracle use).
    pub fn attach(arc: PuiseuxArc, defining: &BivarPoly) -> RefinableArc {
        RefinableArc::from_parts(arc, FracPoly::from_bivar(defining))
    }
}

use num_integer::Integer;

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

    #[test]
    fn cusp_family_polar_data() {
        // Two arcs ±y^5, h0 = 12 both, a0 = 1 both, tangential to x = 0.
        let analysis = polar_arcs(&poly("x^3 - 3*x*y^10 + y^12"), &opts()).unwrap();
        assert_eq!(analysis.arcs.len(), 2);
        for arc in &analysis.arcs {
            assert_eq!(arc.h0, qi(12));
            assert!(arc.a0.eq_exact(&Scalar::one()));
            assert!(arc.is_tangential);
            assert!(arc.tangent_lambda.eq_exact(&Scalar::zero()));
            assert_eq!(arc.d_gr, qi(6));
        }
        // Contact 5 < degree 6: two singleton canyons.
        assert_eq!(analysis.canyons.len(), 2);
    }

    #[test]
    fn two_parameter_family_polar_data() {
        let analysis = polar_arcs(&poly("x^3 + x^2*y^3 + y^9 + x*y^7"), &opts()).unwrap();
        assert_eq!(analysis.arcs.len(), 2);
        let mut h0s: Vec<Q> = analysis.arcs.iter().map(|a| a.h0.clone()).collect();
        h0s.sort();
        assert_eq!(h0s, vec![qi(9), qi(9)]);
        let mut a0s: Vec<Scalar> = analysis.arcs.iter().map(|a| a.a0.clone()).collect();
        a0s.sort_by(|x, y| x.canonical_cmp(y));
        assert!(a0s[0].eq_exact(&Scalar::one()));
        assert!(a0s[1].eq_exact(&Scalar::from_q(q(31, 27))));
        for arc in &analysis.arcs {
            assert_eq!(arc.d_gr, qi(5), "gradient degree");
            assert!(arc.is_tangential);
        }
        // Contact 3 < 5: singleton canyons.
        assert_eq!(analysis.canyons.len(), 2);
    }

    #[test]
    fn cusp_single_zero_arc() {
        let analysis = polar_arcs(&poly("x^2 - y^3"), &opts()).unwrap();
        assert_eq!(analysis.arcs.len(), 1);
        let arc = &analysis.arcs[0];
        assert!(arc.arc.terms.is_empty());
        assert_eq!(arc.h0, qi(3));
        assert!(arc.a0.eq_exact(&Scalar::from_int(-1)));
        assert_eq!(arc.d_gr, qi(2));
        assert!(arc.is_tangential);
        assert_eq!(analysis.canyons.len(), 1);
    }

    #[test]
    fn smooth_direction_is_not_tangential() {
        // x^2 + xy + y^5: polar arc x = -y/2, Σ_f empty, d_gr = 1.
        let analysis = polar_arcs(&poly("x^2 + x*y + y^5"), &opts()).unwrap();
        assert_eq!(analysis.arcs.len(), 1);
        let arc = &analysis.arcs[0];
        assert!(arc.tangent_lambda.eq_exact(&Scalar::from_q(q(-1, 2))));
        assert!(!arc.is_tangential);
        assert_eq!(arc.d_gr, qi(1));
    }

    #[test]
    fn tangentiality_iff_degree_above_one() {
        for text in [
            "x^3 - 3*x*y^10 + y^12",
            "x^3 + x^2*y^3 + y^9 + x*y^7",
            "x^2 - y^3",
            "x^2 + x*y + y^5",
            "x^3 - 3*x*y^3 + y^6",
        ] {
            let analysis = polar_arcs(&poly(text), &opts()).unwrap();
            for arc in &analysis.arcs {
                assert_eq!(
                    arc.is_tangential,
                    arc.d_gr > qi(1),
                    "tangentiality mismatch for {text}"
                );
            }
        }
    }

    #[test]
    fn ramified_polar_class_shares_canyon() {
        // f = x^3 - 3xy^3 + y^6: f_x = 3x^2 - 3y^3, arcs ±y^{3/2} (N = 2).
        let analysis = polar_arcs(&poly("x^3 - 3*x*y^3 + y^6"), &opts()).unwrap();
        assert_eq!(analysis.arcs.len(), 2);
        for arc in &analysis.arcs {
            assert_eq!(arc.h0, q(9, 2));
            assert_eq!(arc.arc.ram, 2);
            assert_eq!(arc.d_gr, qi(2));
        }
        // Conjugates share the image: one canyon.
        assert_eq!(analysis.canyons.len(), 1);
        assert_eq!(analysis.canyons[0].member_arc_ids.len(), 2);
        // a0 = ∓2 on the two conjugates.
        let mut a0s: Vec<Scalar> = analysis.arcs.iter().map(|a| a.a0.clone()).collect();
        a0s.sort_by(|x, y| x.canonical_cmp(y));
        assert!(a0s[0].eq_exact(&Scalar::from_int(-2)));
        assert!(a0s[1].eq_exact(&Scalar::from_int(2)));
    }

    #[test]
    fn conjugation_invariance_of_gradient_degree() {
        let f = poly("x^3 - 3*x*y^3 + y^6");
        let analysis = polar_arcs(&f, &opts()).unwrap();
        for arc in &analysis.arcs {
            let direct = gradient_degree(&f, &arc.arc, &opts()).unwrap();
            assert_eq!(direct, arc.d_gr);
        }
    }

    #[test]
    fn window_covers_pair_construction() {
        for text in ["x^3 - 3*x*y^10 + y^12", "x^3 + x^2*y^3 + y^9 + x*y^7"] {
            let analysis = polar_arcs(&poly(text), &opts()).unwrap();
            for arc in &analysis.arcs {
                let needed = &arc.h0 + &arc.d_gr - Q::one();
                assert!(arc.expansion.window >= XRat::Fin(needed), "window for {text}");
            }
        }
    }

    #[test]
    fn multiple_root_rejected() {
        let err = polar_arcs(&poly("x^2 - 2*x*y + y^2"), &opts()).unwrap_err();
        assert_eq!(err, Error::MultipleRoot);
        let err = polar_arcs(&poly("y^2 + x^3"), &opts()).unwrap_err();
        assert_eq!(err, Error::NotMiniRegular);
    }
}
