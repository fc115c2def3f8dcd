//! Randomized laws for the coefficient rings and the differential
//! polynomial calculus.

use proptest::prelude::*;

use akns::algebra::{DiffMono, DiffPoly, GaussRat, SymPoly};

fn gauss_rat() -> impl Strategy<Value = GaussRat> {
    (-30i64..=30, 1i64..=12, -30i64..=30, 1i64..=12)
        .prop_map(|(a, b, c, d)| &GaussRat::ratio(a, b) + &GaussRat::ratio_i(c, d))
}

fn sym_poly() -> impl Strategy<Value = SymPoly> {
    let term = (0u32..3, 0u32..3, gauss_rat());
    proptest::collection::vec(term, 0..4).prop_map(|terms| {
        let c1 = SymPoly::symbol("C1");
        let c2 = SymPoly::symbol("C2");
        let mut acc = SymPoly::zero();
        for (e1, e2, coeff) in terms {
            let mut t = SymPoly::constant(coeff);
            for _ in 0..e1 {
                t = t.mul(&c1);
            }
            for _ in 0..e2 {
                t = t.mul(&c2);
            }
            acc = acc.add(&t);
        }
        acc
    })
}

fn diff_mono() -> impl Strategy<Value = DiffMono> {
    proptest::collection::vec((any::<bool>(), 0u32..=3), 0..=3).prop_map(|factors| {
        let mut m = DiffMono::one();
        for (is_q, order) in factors {
            let f = if is_q {
                DiffMono::var_q(order)
            } else {
                DiffMono::var_p(order)
            };
            m = m.mul(&f);
        }
        m
    })
}

fn diff_poly() -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec((diff_mono(), gauss_rat()), 0..=8).prop_map(|terms| {
        let mut acc = DiffPoly::zero();
        for (m, c) in terms {
            acc = acc.add(&DiffPoly::from_mono(m).scale(&c));
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn gauss_rat_ring_axioms(a in gauss_rat(), b in gauss_rat(), c in gauss_rat()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &GaussRat::zero(), a.clone());
        prop_assert_eq!(&a * &GaussRat::one(), a.clone());
        prop_assert_eq!(&a + &(-&a), GaussRat::zero());
    }

    #[test]
    fn gauss_rat_division(a in gauss_rat(), b in gauss_rat()) {
        if let Ok(quotient) = a.checked_div(&b) {
            prop_assert_eq!(&quotient * &b, a);
        } else {
            prop_assert!(b.is_zero());
        }
    }

    #[test]
    fn gauss_rat_print_parse(a in gauss_rat()) {
        let text = a.to_string();
        let back: GaussRat = text.parse().expect("canonical form parses");
        prop_assert_eq!(back, a);
    }

    #[test]
    fn sym_poly_ring_axioms(a in sym_poly(), b in sym_poly(), c in sym_poly()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.sub(&a), SymPoly::zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn integrate_inverts_derive(h in diff_poly()) {
        let anti = h.derive().integrate().expect("derivatives are exact");
        let expected = h.sub(&DiffPoly::constant(h.constant_term()));
        prop_assert_eq!(anti, expected);
    }

    #[test]
    fn derive_is_linear(a in diff_poly(), b in diff_poly(), s in gauss_rat(), t in gauss_rat()) {
        let combo = a.scale(&s).add(&b.scale(&t)).derive();
        let split = a.derive().scale(&s).add(&b.derive().scale(&t));
        prop_assert_eq!(combo, split);
    }

    #[test]
    fn derive_satisfies_leibniz(a in diff_poly(), b in diff_poly()) {
        let lhs = a.mul(&b).derive();
        let rhs = a.derive().mul(&b).add(&a.mul(&b.derive()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diff_poly_print_parse(h in diff_poly()) {
        let text = h.to_string();
        let back: DiffPoly = text.parse().unwrap_or_else(|e| panic!("{text:?}: {e}"));
        prop_assert_eq!(back, h);
    }
}

#[test]
fn product_rule_fixture() {
    // d/dx (p q^(1)) = p^(1) q^(1) + p q^(2)
    let h = DiffPoly::p().mul(&DiffPoly::qd(1));
    let expected = DiffPoly::pd(1)
        .mul(&DiffPoly::qd(1))
        .add(&DiffPoly::p().mul(&DiffPoly::qd(2)));
    assert_eq!(h.derive(), expected);
}

#[test]
fn symbolic_constants_survive_round_trips() {
    let c1 = SymPoly::symbol("C1");
    let f2 = DiffPoly::qd(1)
        .scale(&GaussRat::ratio(1, 2))
        .add(&DiffPoly::q().scale_sym(&c1.scale(&-GaussRat::i())));
    let text = f2.to_string();
    let back: DiffPoly = text.parse().expect("printed hierarchy term parses");
    assert_eq!(back, f2);
}
