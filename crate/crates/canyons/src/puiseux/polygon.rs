//! Newton polygons: lower-left convex hulls of supports, with per-edge
//! polynomials read off the points on each edge.

use crate::error::Result;
use crate::poly::{BivarPoly, UnivarPoly};
use crate::ratio::Q;
use crate::scalar::Scalar;
use crate::series::FracPoly;
use num_bigint::BigInt;
use num_traits::Zero;

/// One downward edge: exponent jump `slope` per unit of z-degree, spanning
/// z-degrees `i0 < i1`.
#[derive(Debug, Clone)]
pub struct PolygonEdge {
    pub slope: Q,
    pub i0: u32,
    pub i1: u32,
    /// Coefficients of the edge polynomial, index = offset from `i0`.
    pub poly: UnivarPoly,
}

#[derive(Debug, Clone)]
pub struct NewtonPolygon {
    /// All support points `(z-degree, y-exponent)`.
    pub support: Vec<(u32, Q)>,
    /// Lower hull vertices, ascending z-degree.
    pub hull: Vec<(u32, Q)>,
    /// Edges with positive slope in the root-order convention
    /// (y-exponent decreasing as z-degree grows).
    pub edges: Vec<PolygonEdge>,
}

/// Polygon of a bivariate polynomial in variables `(z, y) = (x, y)`.
pub fn newton_polygon(f: &BivarPoly) -> NewtonPolygon {
    let support: Vec<(u32, Q)> = f
        .terms()
        .map(|(e, _)| (e.x, Q::from_integer(BigInt::from(e.y))))
        .collect();
    let coeff = |i: u32, e: &Q| -> Scalar {
        if e.denom() == &BigInt::from(1) {
            if let Some(j) = num_traits::ToPrimitive::to_u32(&e.to_integer()) {
                return f.coeff(i, j);
            }
        }
        Scalar::zero()
    };
    build_polygon(support, coeff)
}

/// Polygon of a shifted series polynomial; column leading terms must be
/// certified by the caller-supplied material (zero-tested).
pub fn polygon_of_fracpoly(g: &FracPoly, eps: &Q) -> Result<NewtonPolygon> {
    let mut support: Vec<(u32, Q)> = Vec::new();
    for (i, col) in g.cols.iter().enumerate() {
        if let Some((e, _)) = col.leading_checked(eps)? {
            support.push((i as u32, e));
        }
    }
    let coeff = |i: u32, e: &Q| -> Scalar {
        g.col(i as usize)
            .map(|c| c.coeff_at(e))
            .unwrap_or_else(Scalar::zero)
    };
    Ok(build_polygon(support, coeff))
}

fn build_polygon<F: Fn(u32, &Q) -> Scalar>(
    support: Vec<(u32, Q)>,
    coeff_at: F,
) -> NewtonPolygon {
    // Per z-degree, only the minimal exponent can sit on the lower hull.
    let mut minima: Vec<(u32, Q)> = Vec::new();
    let mut sorted = support.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    for (i, e) in &sorted {
        match minima.last() {
            Some((pi, _)) if pi == i => {}
            _ => minima.push((*i, e.clone())),
        }
    }
    // Andrew's monotone chain lower hull with exact rational cross products.
    let mut hull: Vec<(u32, Q)> = Vec::new();
    for p in &minima {
        while hull.len() >= 2 {
            let o = &hull[hull.len() - 2];
            let a = &hull[hull.len() - 1];
            let cross = (Q::from_integer(BigInt::from(a.0 - o.0)) * (&p.1 - &o.1))
                - ((&a.1 - &o.1) * Q::from_integer(BigInt::from(p.0 - o.0)));
            if cross <= Q::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    let mut edges = Vec::new();
    for w in hull.windows(2) {
        let (i0, e0) = &w[0];
        let (i1, e1) = &w[1];
        if e1 >= e0 {
            // Non-descending edge: roots not through the origin; skip.
            continue;
        }
        let slope = (e0 - e1) / Q::from_integer(BigInt::from(i1 - i0));
        let mut coeffs = vec![Scalar::zero(); (i1 - i0) as usize + 1];
        for i in *i0..=*i1 {
            let expected = e0 - &slope * Q::from_integer(BigInt::from(i - i0));
            let c = coeff_at(i, &expected);
            coeffs[(i - i0) as usize] = c;
        }
        edges.push(PolygonEdge {
            slope,
            i0: *i0,
            i1: *i1,
            poly: UnivarPoly::from_coeffs(coeffs),
        });
    }
    // Hull order is already steepest edge (highest root order) first.
    NewtonPolygon { support: sorted, hull, edges }
}
