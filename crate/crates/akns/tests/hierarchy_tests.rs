//! Structural laws of the recursion and exact constant-vector fixtures
//! for the trigonometric pole data.

use akns::algebra::{DiffPoly, GaussRat};
use akns::hierarchy::{
    compute_fg, propagation_check, solve_constants, stationary_residual, ConstantVector,
    SolveOutcome,
};
use akns::series::csc_series;

fn rat(a: i64, b: i64) -> GaussRat {
    GaussRat::ratio(a, b)
}

/// Weight of one coefficient term: C_j carries weight j.
fn constant_weight(vars: &[(&str, u32)]) -> u32 {
    vars.iter()
        .map(|(name, exp)| {
            let index: u32 = name[1..].parse().expect("constants are C<j>");
            index * exp
        })
        .sum()
}

#[test]
fn recursion_is_exact_through_k8() {
    for k in 1..=8u32 {
        let pair = compute_fg(k).unwrap();
        let anti = DiffPoly::p()
            .mul(&pair.f)
            .add(&DiffPoly::q().mul(&pair.g))
            .integrate();
        assert!(anti.is_ok(), "p*f_{k} + q*g_{k} must be exact");
    }
}

#[test]
fn weight_homogeneity_through_k8() {
    // grading: p^(j), q^(j) weigh j+1 and C_j weighs j; every term of f_k
    // and g_k is homogeneous of total weight k
    for k in 1..=8u32 {
        let pair = compute_fg(k).unwrap();
        for poly in [&pair.f, &pair.g] {
            for (mono, coeff) in poly.terms() {
                for (vars, _) in coeff.terms() {
                    assert_eq!(
                        mono.weight() + constant_weight(&vars),
                        k,
                        "inhomogeneous term in pair {k}"
                    );
                }
            }
        }
    }
}

#[test]
fn charge_uniformity_gives_scaling_symmetry() {
    // under p -> t p, q -> t^-1 q each monomial picks up t^-charge, so
    // charge +1 across f_k (and -1 across g_k) is exactly the transformation
    // law f_k -> t^-1 f_k, g_k -> t g_k with unchanged constants
    for k in 1..=6u32 {
        let pair = compute_fg(k).unwrap();
        for (mono, _) in pair.f.terms() {
            assert_eq!(mono.charge(), 1, "f_{k} charge");
        }
        for (mono, _) in pair.g.terms() {
            assert_eq!(mono.charge(), -1, "g_{k} charge");
        }
    }
}

#[test]
fn printed_third_pair_parses_back() {
    let pair = compute_fg(3).unwrap();
    let f3: DiffPoly = "1/4*i * q^(2) + 1/2*C1 * q^(1) - i*C2 * q - 1/2*i * p * q^2"
        .parse()
        .unwrap();
    let g3: DiffPoly = "-1/4*i * p^(2) + 1/2*C1 * p^(1) + i*C2 * p + 1/2*i * p^2 * q"
        .parse()
        .unwrap();
    assert_eq!(pair.f, f3);
    assert_eq!(pair.g, g3);
}

#[test]
fn csc_constants_and_propagation() {
    let s = csc_series(&GaussRat::one(), 30);
    match solve_constants(&s, &s, 2, 20).unwrap() {
        SolveOutcome::Solved(c) => {
            assert_eq!(c.values(), &[GaussRat::zero(), rat(-1, 4)]);
        }
        other => panic!("expected a solution, got {other:?}"),
    }

    let c = ConstantVector::new(vec![GaussRat::zero(), rat(-1, 4)]);
    let verdict = stationary_residual(&s, &s, 2, &c, 20).unwrap();
    assert!(verdict.is_zero);

    // with constants past m left at zero the whole tail vanishes
    assert!(propagation_check(&s, &s, 2, &c, 3, 18).unwrap());

    // forcing C3 = 1 re-excites the flow: f_4 = -i C3 q + ... != 0
    let forced = ConstantVector::new(vec![GaussRat::zero(), rat(-1, 4), GaussRat::one()]);
    assert!(!propagation_check(&s, &s, 2, &forced, 3, 18).unwrap());
}

#[test]
fn zero_pair_is_stationary_at_any_order() {
    let z: akns::series::Laurent<GaussRat> = akns::series::Laurent::zero_to(20);
    for m in 1..=4 {
        let c = ConstantVector::zeros(m as usize);
        assert!(stationary_residual(&z, &z, m, &c, 6).unwrap().is_zero);
    }
}

#[test]
fn scaled_csc_constants_n2() {
    let s = csc_series(&GaussRat::from_int(2), 30);
    match solve_constants(&s, &s, 5, 20).unwrap() {
        SolveOutcome::Solved(c) => {
            assert_eq!(
                c.values(),
                &[
                    GaussRat::zero(),
                    rat(-5, 2),
                    GaussRat::zero(),
                    rat(9, 16),
                    GaussRat::zero(),
                ]
            );
        }
        other => panic!("expected a solution, got {other:?}"),
    }
}

#[test]
fn scaled_csc_constants_n3() {
    let s = csc_series(&GaussRat::from_int(3), 30);
    match solve_constants(&s, &s, 7, 20).unwrap() {
        SolveOutcome::Solved(c) => {
            assert_eq!(
                c.values(),
                &[
                    GaussRat::zero(),
                    rat(-35, 4),
                    GaussRat::zero(),
                    rat(259, 16),
                    GaussRat::zero(),
                    rat(-225, 64),
                    GaussRat::zero(),
                ]
            );
        }
        other => panic!("expected a solution, got {other:?}"),
    }
}

#[test]
fn mismatched_scales_have_no_constants() {
    let p = csc_series(&GaussRat::one(), 24);
    let q = csc_series(&GaussRat::from_int(2), 24);
    for m in 2..=4u32 {
        match solve_constants(&p, &q, m, 14).unwrap() {
            SolveOutcome::Infeasible { .. } => {}
            other => panic!("m = {m}: expected infeasible, got {other:?}"),
        }
    }
}
