//! Evaluation of differential polynomials on series is a differential ring
//! homomorphism; spot checks on the trigonometric and elliptic generators.

use akns::algebra::{DiffPoly, GaussRat};
use akns::series::{
    csc_series, eval_diffpoly_numeric, wp_series, EllipticParams, Laurent,
};

fn rat(a: i64, b: i64) -> GaussRat {
    GaussRat::ratio(a, b)
}

fn eval(f: &DiffPoly, p: &Laurent<GaussRat>, q: &Laurent<GaussRat>) -> Laurent<GaussRat> {
    eval_diffpoly_numeric(f, p, q).unwrap()
}

#[test]
fn evaluation_respects_ring_operations() {
    let p = csc_series(&GaussRat::one(), 10);
    let q = wp_series(&EllipticParams::lemniscatic(), 10);

    let a: DiffPoly = "1/2 * p^(1) * q - i * q^2".parse().unwrap();
    let b: DiffPoly = "p + 3 * q^(2)".parse().unwrap();

    let sum = eval(&a.add(&b), &p, &q);
    assert_eq!(sum, eval(&a, &p, &q).add(&eval(&b, &p, &q)));

    let prod = eval(&a.mul(&b), &p, &q);
    let split = eval(&a, &p, &q).mul(&eval(&b, &p, &q));
    // cutoff bookkeeping may differ between the two evaluation orders;
    // compare on the common known range
    let common = prod.cutoff().min(split.cutoff());
    assert_eq!(prod.truncate(common), split.truncate(common));
}

#[test]
fn evaluation_intertwines_derivatives() {
    let p = csc_series(&GaussRat::one(), 10);
    let q = csc_series(&GaussRat::from_int(2), 10);
    let a: DiffPoly = "p * q + 1/3 * q^(1)^2".parse().unwrap();
    let lhs = eval(&a.derive(), &p, &q);
    let rhs = eval(&a, &p, &q).derive();
    let common = lhs.cutoff().min(rhs.cutoff());
    assert_eq!(lhs.truncate(common), rhs.truncate(common));
}

#[test]
fn csc_squared_matches_sin_reciprocal() {
    let s = csc_series(&GaussRat::one(), 12);
    let sq = s.mul(&s);
    assert_eq!(sq.coeff(-2), rat(1, 1));
    assert_eq!(sq.coeff(0), rat(1, 3));
    assert_eq!(sq.coeff(2), rat(1, 15));
    assert_eq!(sq.coeff(4), rat(2, 189));
    for k in [-1i64, 1, 3, 5] {
        assert!(sq.coeff(k).is_zero());
    }
}

#[test]
fn wp_satisfies_its_differential_equation() {
    // (w')^2 = 4 w^3 - g2 w - g3 for a non-lemniscatic parameter choice
    let params = EllipticParams::new(rat(7, 1), rat(-3, 1), rat(1, 1)).unwrap();
    let w = wp_series(&params, 12);
    let lhs = w.derive().pow(2);
    let rhs = w
        .pow(3)
        .scale(&rat(4, 1))
        .sub(&w.scale(&rat(7, 1)))
        .sub(&Laurent::monomial(0, rat(-3, 1)));
    let common = lhs.cutoff().min(rhs.cutoff());
    assert_eq!(lhs.truncate(common), rhs.truncate(common));
}
