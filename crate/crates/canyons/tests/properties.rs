//! Property tests: exact/approximate agreement, serialization round trips,
//! and the contact-order inequality.

use canyons::poly::{resultant_x, BivarPoly};
use canyons::puiseux::{contact_order, contact_order_starred, Contact, PuiseuxArc};
use canyons::ratio::{Q, XRat};
use canyons::scalar::Scalar;
use canyons::Options;
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_bivar(max_coeff: i64) -> impl Strategy<Value = BivarPoly> {
    // Dense degree <= 2 in x, <= 2 in y with small integer coefficients and
    // a guaranteed nonzero x^2 leading coefficient.
    (
        proptest::collection::vec(-max_coeff..=max_coeff, 9),
        1i64..=max_coeff,
    )
        .prop_map(|(cs, lead)| {
            let mut f = BivarPoly::zero();
            for (idx, c) in cs.iter().enumerate() {
                let (i, j) = ((idx / 3) as u32, (idx % 3) as u32);
                f.add_term(i, j, Scalar::from_int(*c));
            }
            f.add_term(2, 0, Scalar::from_int(lead));
            f
        })
}

fn small_q() -> impl Strategy<Value = Q> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Q::new(BigInt::from(n), BigInt::from(d)))
}

fn exact_scalar() -> impl Strategy<Value = Scalar> {
    (small_q(), small_q()).prop_map(|(re, im)| Scalar::Exact(re, im))
}

proptest! {
    /// Exact and ball evaluation agree within the reported radius.
    #[test]
    fn exact_and_approx_pipelines_agree(a in exact_scalar(), b in exact_scalar()) {
        let prec = 128;
        let ops: [(&str, Option<Scalar>); 3] = [
            ("add", Some(a.add(&b))),
            ("mul", Some(a.mul(&b))),
            ("div", a.div(&b).ok()),
        ];
        for (name, exact) in ops {
            let Some(exact) = exact else { continue };
            let ba = Scalar::Approx(a.to_ball(prec));
            let bb = Scalar::Approx(b.to_ball(prec));
            let approx = match name {
                "add" => ba.add(&bb),
                "mul" => ba.mul(&bb),
                _ => match ba.div(&bb) {
                    Ok(v) => v,
                    Err(_) => continue, // divisor ball touches zero
                },
            };
            let diff = exact.sub(&approx);
            let (_, hi) = diff.abs_bounds_q();
            // |exact - center| <= radius, and the difference scalar's upper
            // bound already includes that radius.
            prop_assert!(
                hi <= Q::new(BigInt::from(1), BigInt::from(2).pow(64)),
                "{name}: disagreement bound {hi}"
            );
        }
    }

    /// Exact scalar serialization round-trips through both the display form
    /// and JSON.
    #[test]
    fn scalar_serialization_round_trips(s in exact_scalar()) {
        let text = s.to_display_string();
        let (re, im) = canyons::scalar::parse_exact_scalar(&text).expect("parses");
        prop_assert!(Scalar::Exact(re, im).eq_exact(&s));
        let js = serde_json::to_string(&s).unwrap();
        let back: Scalar = serde_json::from_str(&js).unwrap();
        prop_assert!(back.eq_exact(&s));
    }

    /// Rational strings round-trip.
    #[test]
    fn rational_round_trips(v in small_q()) {
        let text = canyons::ratio::fmt_q(&v);
        prop_assert_eq!(canyons::ratio::parse_q(&text), Some(v));
    }

    /// Resultants are multiplicative in the first argument, and swapping
    /// arguments flips the sign by (-1)^(deg f * deg g).
    #[test]
    fn resultant_multiplicativity_and_swap(
        f in small_bivar(3),
        g in small_bivar(3),
        h in small_bivar(3),
    ) {
        let fg = f.mul(&g);
        let left = resultant_x(&fg, &h).unwrap();
        let right = resultant_x(&f, &h).unwrap().mul(&resultant_x(&g, &h).unwrap());
        prop_assert!(left.sub(&right).is_zero(), "Res(fg, h) = Res(f, h) Res(g, h)");

        let fwd = resultant_x(&f, &g).unwrap();
        let bwd = resultant_x(&g, &f).unwrap();
        let df = f.deg_x().unwrap();
        let dg = g.deg_x().unwrap();
        let expected = if (df * dg) % 2 == 0 { bwd.clone() } else { bwd.neg() };
        prop_assert!(fwd.sub(&expected).is_zero(), "swap sign law");
    }

    /// contact_order(a, b) <= contact_order_starred(a, b).
    #[test]
    fn plain_contact_below_starred(
        e1 in 1i64..=4,
        c1 in -3i64..=3,
        c2 in -3i64..=3,
        twist in 0u32..2,
    ) {
        let opts = Options::default();
        let mk = |terms: Vec<(Q, Scalar)>| PuiseuxArc {
            terms,
            ram: 2,
            residual: XRat::Fin(Q::from_integer(BigInt::from(40))),
            mult: 1,
            conj_class: 0,
            theta_index: 0,
        };
        let half = |n: i64| Q::new(BigInt::from(n), BigInt::from(2));
        let a = mk(vec![(half(2 * e1 + 1), Scalar::from_int(if c1 == 0 { 1 } else { c1 }))]);
        let bsign = if twist == 0 { 1 } else { -1 };
        let b = mk(vec![
            (half(2 * e1 + 1), Scalar::from_int(bsign * if c1 == 0 { 1 } else { c1 })),
            (half(2 * e1 + 4), Scalar::from_int(c2)),
        ]);
        let eps = opts.eps();
        let plain = contact_order(&a, &b, &eps).unwrap();
        let starred = contact_order_starred(&a, &b, &opts).unwrap();
        let key = |c: &Contact| match c {
            Contact::At(e) => XRat::Fin(e.clone()),
            Contact::IndistinguishableAt(l) => l.clone(),
        };
        prop_assert!(key(&plain) <= key(&starred));
    }
}
