//! The classified pattern forces the finite-gap shape of u, and the
//! criterion only ever reads the pole-local coefficients it names.

use akns::algebra::GaussRat;
use akns::gapcheck::{build_potential, finite_gap_check, pipeline, PotentialPoleData};
use akns::hierarchy::ConstantVector;
use akns::poles::{classify_pole, PoleData};
use akns::series::{csc_series, Laurent};

fn rat(a: i64, b: i64) -> GaussRat {
    GaussRat::ratio(a, b)
}

#[test]
fn classified_data_builds_finite_gap_potentials() {
    for n in 1..=3u32 {
        for seed in 0..100u64 {
            let d = PoleData::sample_pattern(n, 2 * n as i64, 0xFEED + seed + 499 * n as u64);
            let report = classify_pole(&d).unwrap();
            assert!(report.passes);

            let (p, q) = d.to_series();
            let u = build_potential(&p, &q, n).unwrap();
            assert_eq!(u.coeff(-2), GaussRat::from_int((n * (n + 1)) as i64));

            let gap = finite_gap_check(&PotentialPoleData::from_series(&u).unwrap()).unwrap();
            assert!(gap.finite_gap, "n = {n} seed = {seed}: {gap:?}");
            assert_eq!(gap.n, Some(n));
        }
    }
}

#[test]
fn constant_shift_changes_only_the_free_coefficient() {
    let s = csc_series(&GaussRat::one(), 10);
    let u = s.mul(&s).scale(&GaussRat::from_int(6));
    let shift = rat(17, 3);
    let shifted = u.add(&Laurent::monomial(0, shift.clone()));

    for k in -2..=u.cutoff().min(shifted.cutoff()) {
        if k == 0 {
            assert_eq!(shifted.coeff(0), &u.coeff(0) + &shift);
        } else {
            assert_eq!(shifted.coeff(k), u.coeff(k), "index {k}");
        }
    }

    let before = finite_gap_check(&PotentialPoleData::from_series(&u).unwrap()).unwrap();
    let after = finite_gap_check(&PotentialPoleData::from_series(&shifted).unwrap()).unwrap();
    assert_eq!(before, after);
}

#[test]
fn pipeline_stages_are_named_in_order() {
    let s = csc_series(&GaussRat::one(), 30);
    let c = ConstantVector::new(vec![GaussRat::zero(), rat(-1, 4)]);
    let report = pipeline(&s, &s, 2, &c, 20).unwrap();
    let names: Vec<&str> = report.stages.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        ["stationary", "classification", "potential", "finite-gap"]
    );
    assert!(report.finite_gap);
    assert_eq!(report.n, Some(1));
}

#[test]
fn scaled_csc_pipeline_n2() {
    let s = csc_series(&GaussRat::from_int(2), 30);
    let c = ConstantVector::new(vec![
        GaussRat::zero(),
        rat(-5, 2),
        GaussRat::zero(),
        rat(9, 16),
        GaussRat::zero(),
    ]);
    let report = pipeline(&s, &s, 5, &c, 18).unwrap();
    assert!(report.finite_gap, "{report:?}");
    assert_eq!(report.n, Some(2));
    let u = build_potential(&s, &s, 2).unwrap();
    assert_eq!(u.coeff(-2), rat(6, 1));
}

#[test]
fn wrong_constants_fail_at_the_stationary_stage() {
    let s = csc_series(&GaussRat::from_int(2), 30);
    let c = ConstantVector::zeros(5);
    let report = pipeline(&s, &s, 5, &c, 18).unwrap();
    assert!(!report.finite_gap);
    assert_eq!(report.failed_stage.as_deref(), Some("stationary"));
}
