//! Randomized corpora for the pole classifier, the product vanishing
//! pattern, and the hierarchy probes at a simple pole.

use akns::algebra::{GaussRat, SymPoly};
use akns::poles::{classify_pole, fg_pole_probe, fg_pole_probe_symbolic, product_laurent, PoleData};

fn rat(a: i64, b: i64) -> GaussRat {
    GaussRat::ratio(a, b)
}

/// 100 deterministic pattern-satisfying samples per n.
fn corpus(n: u32, through: i64) -> Vec<PoleData> {
    (0..100)
        .map(|s| PoleData::sample_pattern(n, through, 0xA5A5_0000 + s + 1000 * n as u64))
        .collect()
}

#[test]
fn sampled_corpora_classify_with_their_n() {
    for n in 1..=3u32 {
        for d in corpus(n, 2 * n as i64) {
            let report = classify_pole(&d).unwrap();
            assert!(report.passes, "n = {n}: {report:?}");
            assert_eq!(report.n, Some(n));
        }
    }
}

#[test]
fn product_pattern_on_sampled_corpora() {
    for n in 1..=3u32 {
        for d in corpus(n, 2 * n as i64) {
            let report = product_laurent(&d).unwrap();
            assert!(report.pattern_holds, "n = {n}: {report:?}");
            assert_eq!(report.n, n);
            assert_eq!(report.product.coeff(-2), GaussRat::from_int((n * n) as i64));
            let mut k = -1;
            while k <= 2 * n as i64 - 1 {
                assert!(report.product.coeff(k).is_zero(), "h_{k} for n = {n}");
                k += 2;
            }
        }
    }
}

#[test]
fn classification_is_scale_covariant() {
    let scales = [rat(2, 1), rat(-1, 3), rat(7, 5)];
    for n in 1..=3u32 {
        for (i, d) in corpus(n, 2 * n as i64).into_iter().enumerate() {
            let lambda = &scales[i % scales.len()];
            let inv = GaussRat::one().checked_div(lambda).unwrap();
            let phi: Vec<GaussRat> = d.phi().iter().map(|c| c * lambda).collect();
            let psi: Vec<GaussRat> = d.psi().iter().map(|c| c * &inv).collect();
            let scaled = PoleData::new(phi, psi).unwrap();
            let report = classify_pole(&scaled).unwrap();
            assert!(report.passes);
            assert_eq!(report.n, Some(n));
        }
    }
}

#[test]
fn single_coefficient_violations_are_located() {
    for n in 1..=3u32 {
        for seed in 0..10u64 {
            let d = PoleData::sample_pattern(n, 2 * n as i64, 7_000 + seed + 100 * n as u64);
            for index in 0..=(2 * n as i64 - 1) {
                let mut phi: Vec<GaussRat> = d.phi().to_vec();
                let slot = (index + 1) as usize;
                phi[slot] = &phi[slot] + &GaussRat::one();
                let broken = PoleData::new(phi, d.psi().to_vec()).unwrap();
                let report = classify_pole(&broken).unwrap();
                assert!(!report.passes);
                let failure = report.first_failure.unwrap();
                assert_eq!(failure.condition, "coefficient-relation");
                assert_eq!(failure.index, index, "n = {n} seed = {seed}");
            }
        }
    }
}

#[test]
fn symbolic_probe_matches_lemma_displays() {
    let phi = SymPoly::symbol("phi");
    let psi = SymPoly::symbol("psi");

    let (a2, b2) = fg_pole_probe_symbolic(2).unwrap();
    assert_eq!(a2, psi.scale(&rat(-1, 2)));
    assert_eq!(b2, phi.scale(&rat(-1, 2)));

    let (a3, _) = fg_pole_probe_symbolic(3).unwrap();
    let expected = psi
        .mul(&phi.mul(&psi).sub(&SymPoly::one()))
        .scale(&GaussRat::ratio_i(-1, 2));
    assert_eq!(a3, expected);
}

#[test]
fn sign_law_holds_identically_through_k7() {
    // B^k_{-k} psi = (-1)^k phi A^k_{-k} as polynomial identities
    let phi = SymPoly::symbol("phi");
    let psi = SymPoly::symbol("psi");
    for k in 1..=7u32 {
        let (a, b) = fg_pole_probe_symbolic(k).unwrap();
        let mut rhs = phi.mul(&a);
        if k % 2 == 1 {
            rhs = rhs.neg();
        }
        assert_eq!(b.mul(&psi), rhs, "k = {k}");
    }
}

#[test]
fn next_order_combination_vanishes_when_classified() {
    // A^k_{-k+1} phi + (-1)^k B^k_{-k+1} psi = 0 under the pattern; both
    // orders are determined by the data at indices -1 and 0 alone
    for n in 1..=3u32 {
        for seed in 0..25u64 {
            let d = PoleData::sample_pattern(n, 0, 0xBEEF + seed + 31 * n as u64);
            for k in 1..=7u32 {
                let probe = fg_pole_probe(k, &d, None).unwrap();
                let mut term = &probe.b_next * &d.psi_at(-1);
                if k % 2 == 1 {
                    term = -&term;
                }
                let lhs = &probe.a_next * &d.phi_at(-1);
                assert_eq!(lhs, -&term, "n = {n} k = {k} seed = {seed}");
            }
        }
    }
}

#[test]
fn leading_term_drops_at_k_equal_2n_plus_1() {
    for n in 1..=3u32 {
        let d = PoleData::sample_pattern(n, 8, 0xD00D + n as u64);
        let k = 2 * n + 1;
        let probe = fg_pole_probe(k, &d, None).unwrap();
        assert!(probe.a_lead.is_zero(), "n = {n}");
        assert!(probe.b_lead.is_zero(), "n = {n}");
        assert!(probe.order.is_none_or(|o| o > -(k as i64)));
    }
}
