//! First-order pole structure of a candidate pair (p, q): the
//! residue-product classification, the vanishing pattern of the pq Laurent
//! coefficients, and leading-coefficient probes of f_k, g_k at the pole.

use num::ToPrimitive;
use thiserror::Error;

use crate::algebra::{GaussRat, SymPoly};
use crate::hierarchy::{compute_fg, ConstantVector, HierarchyError};
use crate::series::{eval_diffpoly, eval_diffpoly_numeric, Laurent, SeriesError};

#[derive(Debug, Error)]
pub enum PoleError {
    #[error("invalid pole data: {0}")]
    Invalid(String),
    #[error("insufficient pole data depth: need coefficients through index {needed}, have through {have}")]
    Depth { needed: i64, have: i64 },
    #[error("pole classification failed: {0}")]
    NotClassified(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
}

/// Laurent coefficients of p and q at one simple pole, indexed from -1.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleData {
    phi: Vec<GaussRat>,
    psi: Vec<GaussRat>,
}

impl PoleData {
    pub fn new(phi: Vec<GaussRat>, psi: Vec<GaussRat>) -> Result<Self, PoleError> {
        if phi.first().is_none_or(|c| c.is_zero()) {
            return Err(PoleError::Invalid(
                "phi[-1] must be present and nonzero for a first-order pole".into(),
            ));
        }
        if psi.first().is_none_or(|c| c.is_zero()) {
            return Err(PoleError::Invalid(
                "psi[-1] must be present and nonzero for a first-order pole".into(),
            ));
        }
        Ok(PoleData { phi, psi })
    }

    /// Coefficient lists starting at index -1.
    pub fn phi(&self) -> &[GaussRat] {
        &self.phi
    }

    pub fn psi(&self) -> &[GaussRat] {
        &self.psi
    }

    pub fn phi_at(&self, index: i64) -> GaussRat {
        self.phi
            .get((index + 1) as usize)
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    pub fn psi_at(&self, index: i64) -> GaussRat {
        self.psi
            .get((index + 1) as usize)
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    /// Highest index covered by both coefficient lists.
    pub fn depth(&self) -> i64 {
        self.phi.len().min(self.psi.len()) as i64 - 2
    }

    pub fn to_series(&self) -> (Laurent<GaussRat>, Laurent<GaussRat>) {
        (
            Laurent::from_parts(-1, self.phi.clone()),
            Laurent::from_parts(-1, self.psi.clone()),
        )
    }

    /// Extract pole data from series with a first-order pole at the center.
    pub fn from_series(
        p: &Laurent<GaussRat>,
        q: &Laurent<GaussRat>,
    ) -> Result<Self, PoleError> {
        for s in [p, q] {
            if s.min_order().is_none_or(|m| m < -1) {
                return Err(PoleError::Invalid(
                    "series must have a pole of order exactly 1".into(),
                ));
            }
        }
        let depth = p.cutoff().min(q.cutoff());
        let grab = |s: &Laurent<GaussRat>| (-1..=depth).map(|k| s.coeff(k)).collect();
        PoleData::new(grab(p), grab(q))
    }

    /// Deterministic pseudo-random data satisfying the full alternating
    /// pattern for the given n, with coefficients through `through`.
    pub fn sample_pattern(n: u32, through: i64, seed: u64) -> PoleData {
        assert!(n >= 1 && through >= -1);
        let mut state = seed;
        let mut psi = Vec::with_capacity((through + 2) as usize);
        let mut psi_m1 = small_rational(&mut state);
        while psi_m1.is_zero() {
            psi_m1 = small_rational(&mut state);
        }
        psi.push(psi_m1.clone());
        for _ in 0..=through {
            psi.push(small_rational(&mut state));
        }
        let n_sq = GaussRat::from_int((n as i64) * (n as i64));
        let phi_m1 = n_sq
            .checked_div(&psi_m1)
            .expect("psi[-1] is nonzero");
        let ratio = (&phi_m1 * &phi_m1)
            .checked_div(&n_sq)
            .expect("n is positive");
        let mut phi = vec![phi_m1];
        for (k, psi_k) in psi.iter().enumerate().skip(1) {
            let index = k as i64 - 1;
            let mut value = &ratio * psi_k;
            if index % 2 == 0 {
                value = -&value;
            }
            phi.push(value);
        }
        PoleData { phi, psi }
    }
}

/// splitmix64; fixed algorithm so sampled corpora are stable across runs.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Small exact value: numerator in -9..=9, denominator in 1..=9, and an
/// imaginary part in one draw out of three.
fn small_rational(state: &mut u64) -> GaussRat {
    let r = splitmix64(state);
    let num = (r % 19) as i64 - 9;
    let den = ((r >> 8) % 9) as i64 + 1;
    let re = GaussRat::ratio(num, den);
    if (r >> 16) % 3 == 0 {
        let inum = ((r >> 24) % 19) as i64 - 9;
        let iden = ((r >> 32) % 9) as i64 + 1;
        &re + &GaussRat::ratio_i(inum, iden)
    } else {
        re
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleFailure {
    /// "product-not-square" for the residue condition, "coefficient-relation"
    /// for the alternating chain.
    pub condition: String,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoleReport {
    pub n: Option<u32>,
    pub passes: bool,
    pub first_failure: Option<PoleFailure>,
    /// Index 2n-1, when n was determined.
    pub checked_through: Option<i64>,
}

/// Check the two local conditions a stationary pair imposes at a simple
/// pole: the residue product is a perfect square n^2, and the coefficients
/// satisfy `phi_k = (-1)^(k+1) psi_k phi_{-1}^2 / n^2` for `0 <= k <= 2n-1`.
pub fn classify_pole(d: &PoleData) -> Result<PoleReport, PoleError> {
    let product = &d.phi_at(-1) * &d.psi_at(-1);
    let n = product
        .perfect_square_root()
        .filter(|r| r.to_u32().is_some_and(|v| v >= 1))
        .and_then(|r| r.to_u32());
    let Some(n) = n else {
        return Ok(PoleReport {
            n: None,
            passes: false,
            first_failure: Some(PoleFailure {
                condition: "product-not-square".into(),
                index: -1,
            }),
            checked_through: None,
        });
    };
    let top = 2 * n as i64 - 1;
    if d.depth() < top {
        return Err(PoleError::Depth {
            needed: top,
            have: d.depth(),
        });
    }
    let n_sq = GaussRat::from_int((n as i64) * (n as i64));
    let ratio = (&d.phi_at(-1) * &d.phi_at(-1))
        .checked_div(&n_sq)
        .expect("n is positive");
    for k in 0..=top {
        let mut expect = &ratio * &d.psi_at(k);
        if k % 2 == 0 {
            expect = -&expect;
        }
        if d.phi_at(k) != expect {
            return Ok(PoleReport {
                n: Some(n),
                passes: false,
                first_failure: Some(PoleFailure {
                    condition: "coefficient-relation".into(),
                    index: k,
                }),
                checked_through: Some(top),
            });
        }
    }
    Ok(PoleReport {
        n: Some(n),
        passes: true,
        first_failure: None,
        checked_through: Some(top),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductReport {
    pub n: u32,
    /// The local pq series, exact to the data's depth.
    pub product: Laurent<GaussRat>,
    /// h_{-2} = n^2 and h_{-1} = h_1 = ... = h_{2n-1} = 0.
    pub pattern_holds: bool,
    pub first_violation: Option<i64>,
}

/// Compute the local pq series and confirm its vanishing pattern. Requires a
/// passing classification and data through index 2n.
pub fn product_laurent(d: &PoleData) -> Result<ProductReport, PoleError> {
    let report = classify_pole(d)?;
    if !report.passes {
        let failure = report
            .first_failure
            .map(|f| format!("{} at index {}", f.condition, f.index))
            .unwrap_or_else(|| "unknown".into());
        return Err(PoleError::NotClassified(failure));
    }
    let n = report.n.expect("passing report carries n");
    let need = 2 * n as i64;
    if d.depth() < need {
        return Err(PoleError::Depth {
            needed: need,
            have: d.depth(),
        });
    }
    let (p, q) = d.to_series();
    let product = p.mul(&q);
    debug_assert!(product.cutoff() >= 2 * n as i64 - 1);
    let n_sq = GaussRat::from_int((n as i64) * (n as i64));
    let mut first_violation = None;
    if product.coeff(-2) != n_sq {
        first_violation = Some(-2);
    } else {
        let mut k = -1;
        while k <= 2 * n as i64 - 1 {
            if !product.coeff(k).is_zero() {
                first_violation = Some(k);
                break;
            }
            k += 2;
        }
    }
    Ok(ProductReport {
        n,
        product,
        pattern_holds: first_violation.is_none(),
        first_violation,
    })
}

/// Leading data of f_k, g_k evaluated on one pole's Laurent coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeResult {
    pub k: u32,
    /// Coefficients of x^-k in f_k and g_k.
    pub a_lead: GaussRat,
    pub b_lead: GaussRat,
    /// Coefficients of x^(-k+1), one step above the leading order.
    pub a_next: GaussRat,
    pub b_next: GaussRat,
    /// Actual leading exponent across the two evaluations, when either is
    /// nonzero somewhere; always >= -k.
    pub order: Option<i64>,
}

/// Evaluate f_k, g_k on the pole data (constants default to zero) and
/// report their leading coefficients.
pub fn fg_pole_probe(
    k: u32,
    d: &PoleData,
    constants: Option<&ConstantVector>,
) -> Result<ProbeResult, PoleError> {
    let pair = compute_fg(k)?;
    let zeros;
    let c = match constants {
        Some(c) => c,
        None => {
            zeros = ConstantVector::zeros(k.saturating_sub(1) as usize);
            &zeros
        }
    };
    let subs = c.substitution((k - 1) as usize);
    let (p, q) = d.to_series();
    let have = d.depth();
    let mut series = Vec::with_capacity(2);
    for poly in [&pair.f, &pair.g] {
        let out = eval_diffpoly_numeric(&poly.substitute_constants(&subs), &p, &q)?;
        let want = -(k as i64) + 1;
        if out.cutoff() < want {
            return Err(PoleError::Depth {
                needed: have + (want - out.cutoff()),
                have,
            });
        }
        series.push(out);
    }
    let (fs, gs) = (&series[0], &series[1]);
    let order = match (fs.min_order(), gs.min_order()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    debug_assert!(order.is_none_or(|o| o >= -(k as i64)));
    Ok(ProbeResult {
        k,
        a_lead: fs.coeff(-(k as i64)),
        b_lead: gs.coeff(-(k as i64)),
        a_next: fs.coeff(-(k as i64) + 1),
        b_next: gs.coeff(-(k as i64) + 1),
        order,
    })
}

/// Leading coefficients of f_k, g_k as polynomials in the residues alone:
/// the pole data is `phi/x`, `q = psi/x` with every higher coefficient
/// exactly zero, which isolates the universal leading terms.
pub fn fg_pole_probe_symbolic(k: u32) -> Result<(SymPoly, SymPoly), PoleError> {
    let pair = compute_fg(k)?;
    let subs = ConstantVector::zeros(k.saturating_sub(1) as usize)
        .substitution(k.saturating_sub(1) as usize);
    let p = Laurent::monomial(-1, SymPoly::symbol("phi"));
    let q = Laurent::monomial(-1, SymPoly::symbol("psi"));
    let f = eval_diffpoly(&pair.f.substitute_constants(&subs), &p, &q);
    let g = eval_diffpoly(&pair.g.substitute_constants(&subs), &p, &q);
    Ok((f.coeff(-(k as i64)), g.coeff(-(k as i64))))
}
