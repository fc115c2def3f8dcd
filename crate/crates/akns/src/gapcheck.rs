//! Building the potential u = ((n+1)/n) p q and certifying the finite-gap
//! pole criterion: a second-order pole with a_{-2} = n(n+1) and vanishing
//! odd coefficients through index 2n-1.

use num::bigint::BigInt;
use num::ToPrimitive;
use thiserror::Error;

use crate::algebra::GaussRat;
use crate::hierarchy::{stationary_residual, ConstantVector, HierarchyError};
use crate::poles::{classify_pole, PoleData, PoleError};
use crate::series::{Laurent, SeriesError};

#[derive(Debug, Error)]
pub enum GapError {
    #[error("invalid potential data: {0}")]
    Invalid(String),
    #[error("insufficient potential depth: need coefficients through index {needed}, have through {have}")]
    Depth { needed: i64, have: i64 },
    #[error("series depth mismatch: p is known through order {p_cutoff}, q through {q_cutoff}")]
    DepthMismatch { p_cutoff: i64, q_cutoff: i64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Hierarchy(#[from] HierarchyError),
    #[error(transparent)]
    Pole(#[from] PoleError),
}

/// Laurent coefficients of the potential u at one pole, indexed from -2.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPoleData {
    a: Vec<GaussRat>,
}

impl PotentialPoleData {
    pub fn new(a: Vec<GaussRat>) -> Result<Self, GapError> {
        if a.first().is_none_or(|c| c.is_zero()) {
            return Err(GapError::Invalid(
                "a[-2] must be present and nonzero for a second-order pole".into(),
            ));
        }
        Ok(PotentialPoleData { a })
    }

    /// Coefficients starting at index -2.
    pub fn coeffs(&self) -> &[GaussRat] {
        &self.a
    }

    pub fn at(&self, index: i64) -> GaussRat {
        self.a
            .get((index + 2) as usize)
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    /// Highest index covered by the data.
    pub fn depth(&self) -> i64 {
        self.a.len() as i64 - 3
    }

    pub fn from_series(u: &Laurent<GaussRat>) -> Result<Self, GapError> {
        if u.min_order().is_none_or(|m| m < -2) {
            return Err(GapError::Invalid(
                "series must have a pole of order exactly 2".into(),
            ));
        }
        PotentialPoleData::new((-2..=u.cutoff()).map(|k| u.coeff(k)).collect())
    }

    pub fn to_series(&self) -> Laurent<GaussRat> {
        Laurent::from_parts(-2, self.a.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapFailure {
    /// "leading-coefficient" when a[-2] is not n(n+1), "odd-coefficient"
    /// when some a at odd index through 2n-1 is nonzero.
    pub condition: String,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub finite_gap: bool,
    pub n: Option<u32>,
    pub first_failure: Option<GapFailure>,
}

/// If `value` = n(n+1) for a positive integer n, return n.
fn triangular_root(value: &GaussRat) -> Option<u32> {
    if !value.is_real() {
        return None;
    }
    let r = value.re();
    if !r.is_integer() {
        return None;
    }
    // n(n+1) = a  <=>  (2n+1)^2 = 4a+1
    let disc: BigInt = BigInt::from(4) * r.numer() + 1;
    if disc <= BigInt::from(0) {
        return None;
    }
    let s = disc.sqrt();
    if &s * &s != disc {
        return None;
    }
    let n: BigInt = (s - 1) / 2;
    n.to_u32().filter(|&n| n >= 1)
}

/// The pole-local finite-gap criterion.
pub fn finite_gap_check(u: &PotentialPoleData) -> Result<GapReport, GapError> {
    let Some(n) = triangular_root(&u.at(-2)) else {
        return Ok(GapReport {
            finite_gap: false,
            n: None,
            first_failure: Some(GapFailure {
                condition: "leading-coefficient".into(),
                index: -2,
            }),
        });
    };
    let top = 2 * n as i64 - 1;
    if u.depth() < top {
        return Err(GapError::Depth {
            needed: top,
            have: u.depth(),
        });
    }
    let mut k = -1;
    while k <= top {
        if !u.at(k).is_zero() {
            return Ok(GapReport {
                finite_gap: false,
                n: Some(n),
                first_failure: Some(GapFailure {
                    condition: "odd-coefficient".into(),
                    index: k,
                }),
            });
        }
        k += 2;
    }
    Ok(GapReport {
        finite_gap: true,
        n: Some(n),
        first_failure: None,
    })
}

/// u = ((n+1)/n) p q with consistent truncation.
pub fn build_potential(
    p: &Laurent<GaussRat>,
    q: &Laurent<GaussRat>,
    n: u32,
) -> Result<Laurent<GaussRat>, GapError> {
    assert!(n >= 1, "pole order n starts at 1");
    if p.cutoff() != q.cutoff() {
        return Err(GapError::DepthMismatch {
            p_cutoff: p.cutoff(),
            q_cutoff: q.cutoff(),
        });
    }
    let factor = GaussRat::ratio(n as i64 + 1, n as i64);
    Ok(p.mul(q).scale(&factor))
}

/// One stage of the end-to-end certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Aggregate result: every stage in order, stopping at the first failure.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub stages: Vec<StageResult>,
    pub finite_gap: bool,
    pub n: Option<u32>,
    pub failed_stage: Option<String>,
    pub gap: Option<GapReport>,
}

/// Run the whole chain on one pole's series data: stationarity of (p, q) at
/// order m with the given constants, pole classification, construction of
/// u, and the finite-gap criterion. Check failures land in the report;
/// errors (bad input, insufficient depth) propagate.
pub fn pipeline(
    p: &Laurent<GaussRat>,
    q: &Laurent<GaussRat>,
    m: u32,
    c: &ConstantVector,
    k_order: i64,
) -> Result<PipelineReport, GapError> {
    let mut stages = Vec::new();
    let fail = |stages: Vec<StageResult>, name: &str| PipelineReport {
        finite_gap: false,
        n: stages
            .iter()
            .find(|s| s.name == "classification" && s.passed)
            .and_then(|s| s.detail.strip_prefix("n = "))
            .and_then(|v| v.parse().ok()),
        failed_stage: Some(name.into()),
        gap: None,
        stages,
    };

    let verdict = stationary_residual(p, q, m, c, k_order)?;
    stages.push(StageResult {
        name: "stationary".into(),
        passed: verdict.is_zero,
        detail: match &verdict.first_nonzero {
            None => format!("f_{} and g_{} vanish through order {}", m + 1, m + 1, k_order),
            Some(note) => note.clone(),
        },
    });
    if !verdict.is_zero {
        return Ok(fail(stages, "stationary"));
    }

    let data = PoleData::from_series(p, q)?;
    let report = classify_pole(&data)?;
    stages.push(StageResult {
        name: "classification".into(),
        passed: report.passes,
        detail: match (&report.n, &report.first_failure) {
            (Some(n), None) => format!("n = {n}"),
            (_, Some(f)) => format!("{} at index {}", f.condition, f.index),
            _ => "unclassified".into(),
        },
    });
    if !report.passes {
        return Ok(fail(stages, "classification"));
    }
    let n = report.n.expect("passing classification carries n");

    let u = build_potential(p, q, n)?;
    stages.push(StageResult {
        name: "potential".into(),
        passed: true,
        detail: format!("u = {} * p*q", GaussRat::ratio(n as i64 + 1, n as i64)),
    });

    let gap = finite_gap_check(&PotentialPoleData::from_series(&u)?)?;
    stages.push(StageResult {
        name: "finite-gap".into(),
        passed: gap.finite_gap,
        detail: match (&gap.n, &gap.first_failure) {
            (Some(gn), None) => format!("n = {gn}"),
            (_, Some(f)) => format!("{} at index {}", f.condition, f.index),
            _ => "no candidate n".into(),
        },
    });
    let consistent = gap.n == Some(n);
    if !gap.finite_gap || !consistent {
        let name = if gap.finite_gap { "consistency" } else { "finite-gap" };
        if !consistent && gap.finite_gap {
            stages.push(StageResult {
                name: "consistency".into(),
                passed: false,
                detail: format!(
                    "classified n = {n} but potential n = {:?}",
                    gap.n
                ),
            });
        }
        let mut report = fail(stages, name);
        report.gap = Some(gap);
        return Ok(report);
    }

    Ok(PipelineReport {
        stages,
        finite_gap: true,
        n: Some(n),
        failed_stage: None,
        gap: Some(gap),
    })
}
