//! The stationary hierarchy: recursion for the pairs (f_k, g_k), residual
//! checks on Laurent data, an exact solver for the free constants, and the
//! propagation property for indices beyond the stationary order.
//!
//! The recursion is
//!
//! ```text
//! f_{k+1} = (i/2) f_k' - i q (I_k + C_k)
//! g_{k+1} = -(i/2) g_k' + i p (I_k + C_k)      I_k = integral of (p f_k + q g_k)
//! ```
//!
//! seeded by `f_1 = -i q`, `g_1 = i p`. Each step integrates `p f_k + q g_k`
//! in the differential-polynomial ring; exactness of that integral is an
//! internal invariant, not a user-facing error.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock, RwLock};

use num::BigRational;
use thiserror::Error;

use crate::algebra::{DiffPoly, GaussRat, SymPoly};
use crate::series::{eval_diffpoly, eval_diffpoly_numeric, Laurent, SeriesError};

#[derive(Debug, Error)]
pub enum HierarchyError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    /// Propagation is only meaningful from a stationary pair.
    #[error("stationarity precondition failed: {0}")]
    NotStationary(String),
    /// Violations of invariants the recursion is supposed to maintain.
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

/// One rung of the hierarchy: `f_k`, `g_k` with symbolic constants.
#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyPair {
    pub k: u32,
    pub f: DiffPoly,
    pub g: DiffPoly,
    /// The symbols `C1 ... C{k-1}` that may appear in `f`, `g`.
    pub constants_used: Vec<String>,
}

fn memo() -> &'static RwLock<Vec<Arc<HierarchyPair>>> {
    static MEMO: OnceLock<RwLock<Vec<Arc<HierarchyPair>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(Vec::new()))
}

/// The pair (f_k, g_k), computed once and cached for the whole process.
pub fn compute_fg(k: u32) -> Result<Arc<HierarchyPair>, HierarchyError> {
    assert!(k >= 1, "hierarchy index starts at 1");
    {
        let cache = memo().read().expect("memo lock poisoned");
        if let Some(pair) = cache.get((k - 1) as usize) {
            return Ok(Arc::clone(pair));
        }
    }
    let mut cache = memo().write().expect("memo lock poisoned");
    if cache.is_empty() {
        cache.push(Arc::new(HierarchyPair {
            k: 1,
            f: DiffPoly::q().scale(&GaussRat::ratio_i(-1, 1)),
            g: DiffPoly::p().scale(&GaussRat::ratio_i(1, 1)),
            constants_used: Vec::new(),
        }));
    }
    while (cache.len() as u32) < k {
        let prev = cache.last().expect("seeded above").clone();
        let next = step(&prev)?;
        cache.push(Arc::new(next));
    }
    Ok(Arc::clone(&cache[(k - 1) as usize]))
}

fn step(prev: &HierarchyPair) -> Result<HierarchyPair, HierarchyError> {
    let k = prev.k;
    let source = DiffPoly::p()
        .mul(&prev.f)
        .add(&DiffPoly::q().mul(&prev.g));
    let integral = source.integrate().map_err(|e| {
        HierarchyError::Internal(format!(
            "integrand p*f_{k} + q*g_{k} is not an exact derivative: {e}"
        ))
    })?;
    let c_k = SymPoly::symbol(&format!("C{k}"));
    let mid = integral.add(&DiffPoly::constant(c_k));
    let half_i = GaussRat::ratio_i(1, 2);
    let f = prev
        .f
        .derive()
        .scale(&half_i)
        .sub(&DiffPoly::q().mul(&mid).scale(&GaussRat::ratio_i(1, 1)));
    let g = prev
        .g
        .derive()
        .scale(&-&half_i)
        .add(&DiffPoly::p().mul(&mid).scale(&GaussRat::ratio_i(1, 1)));
    debug_assert!(f.max_derivative_order() <= k && g.max_derivative_order() <= k);
    let mut constants_used = prev.constants_used.clone();
    constants_used.push(format!("C{k}"));
    Ok(HierarchyPair {
        k: k + 1,
        f,
        g,
        constants_used,
    })
}

/// Exact values for the constants `C1 ... Cm`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantVector {
    values: Vec<GaussRat>,
}

impl ConstantVector {
    pub fn new(values: Vec<GaussRat>) -> Self {
        ConstantVector { values }
    }

    pub fn zeros(m: usize) -> Self {
        ConstantVector {
            values: vec![GaussRat::zero(); m],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of `C_k` (1-based); constants past the end are zero.
    pub fn get(&self, k: usize) -> GaussRat {
        self.values.get(k - 1).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn values(&self) -> &[GaussRat] {
        &self.values
    }

    /// Substitution map `C1 ... Cupto`, padding zeros past the stored length.
    pub fn substitution(&self, upto: usize) -> BTreeMap<String, GaussRat> {
        (1..=upto.max(self.values.len()))
            .map(|k| (format!("C{k}"), self.get(k)))
            .collect()
    }
}

impl std::fmt::Display for ConstantVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for v in &self.values {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Outcome of checking `f_{m+1} = g_{m+1} = 0` on concrete Laurent data.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryVerdict {
    pub m: u32,
    pub residual_f: Laurent<GaussRat>,
    pub residual_g: Laurent<GaussRat>,
    pub is_zero: bool,
    /// Human-readable locator of the first offending coefficient.
    pub first_nonzero: Option<String>,
}

fn require_depth<C: crate::series::Coeff>(
    out: &Laurent<C>,
    input_cutoff: i64,
    order: i64,
) -> Result<(), SeriesError> {
    if out.cutoff() < order {
        return Err(SeriesError::InsufficientDepth {
            needed: input_cutoff + (order - out.cutoff()),
            have: input_cutoff,
        });
    }
    Ok(())
}

fn first_nonzero_note(label: &str, series: &Laurent<GaussRat>) -> Option<String> {
    series
        .iter()
        .next()
        .map(|(k, c)| format!("{label}: coefficient {c} at x^{k}"))
}

/// Evaluate `f_{m+1}`, `g_{m+1}` on the series with the given constants and
/// report whether all coefficients vanish through order `K`.
pub fn stationary_residual(
    p: &Laurent<GaussRat>,
    q: &Laurent<GaussRat>,
    m: u32,
    c: &ConstantVector,
    k_order: i64,
) -> Result<StationaryVerdict, HierarchyError> {
    let pair = compute_fg(m + 1)?;
    let subs = c.substitution(m as usize);
    let f = pair.f.substitute_constants(&subs);
    let g = pair.g.substitute_constants(&subs);
    let input_cutoff = p.cutoff().min(q.cutoff());
    let rf = eval_diffpoly_numeric(&f, p, q)?;
    require_depth(&rf, input_cutoff, k_order)?;
    let rg = eval_diffpoly_numeric(&g, p, q)?;
    require_depth(&rg, input_cutoff, k_order)?;
    let residual_f = rf.truncate(k_order);
    let residual_g = rg.truncate(k_order);
    let is_zero = residual_f.is_zero() && residual_g.is_zero();
    let first_nonzero = first_nonzero_note("f", &residual_f)
        .or_else(|| first_nonzero_note("g", &residual_g));
    Ok(StationaryVerdict {
        m,
        residual_f,
        residual_g,
        is_zero,
        first_nonzero,
    })
}

/// Result of the constants search at a fixed stationary order.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Solved(ConstantVector),
    /// No exact solution exists at this truncation.
    Infeasible { reason: String },
    /// The nonlinear fallback exceeded its branch bound (or met a shape it
    /// does not handle); no conclusion either way.
    Inconclusive { reason: String },
}

const BRANCH_BOUND: u32 = 16;

/// Solve for `C1 ... Cm` making `f_{m+1} = g_{m+1} = 0` through order `K`.
///
/// The coefficient equations are processed lowest Laurent order first, `f`
/// before `g` at equal order. Each solvable equation eliminates its
/// lowest-index unknown; substitutions are kept fully normalized so later
/// equations see only un-eliminated unknowns. Unknowns never pinned by any
/// equation are set to zero. Equations of the hierarchy are affine-linear in
/// the constants; a univariate-quadratic fallback with deterministic root
/// order and a branch bound covers hypothetical branch points.
pub fn solve_constants(
    p: &Laurent<GaussRat>,
    q: &Laurent<GaussRat>,
    m: u32,
    k_order: i64,
) -> Result<SolveOutcome, HierarchyError> {
    let pair = compute_fg(m + 1)?;
    let ps = p.to_sympoly();
    let qs = q.to_sympoly();
    let input_cutoff = p.cutoff().min(q.cutoff());
    let rf = eval_diffpoly(&pair.f, &ps, &qs);
    require_depth(&rf, input_cutoff, k_order)?;
    let rg = eval_diffpoly(&pair.g, &ps, &qs);
    require_depth(&rg, input_cutoff, k_order)?;
    let rf = rf.truncate(k_order);
    let rg = rg.truncate(k_order);

    let lo = rf
        .min_order()
        .unwrap_or(k_order)
        .min(rg.min_order().unwrap_or(k_order));
    let mut equations = Vec::new();
    for order in lo..=k_order {
        for series in [&rf, &rg] {
            let coeff = series.coeff(order);
            if !coeff.is_zero() {
                equations.push(coeff);
            }
        }
    }

    let mut branches_used = 0u32;
    let outcome = eliminate(&equations, 0, BTreeMap::new(), &mut branches_used)?;
    Ok(match outcome {
        Elimination::Solved(subs) => {
            let mut values = Vec::with_capacity(m as usize);
            for k in 1..=m {
                let name = format!("C{k}");
                let value = match subs.get(&name) {
                    Some(expr) => {
                        // remaining unknowns in the expression are free: zero
                        let zeroed: BTreeMap<String, GaussRat> = expr
                            .vars()
                            .iter()
                            .map(|v| (v.clone(), GaussRat::zero()))
                            .collect();
                        expr.substitute(&zeroed).constant_value().ok_or_else(|| {
                            HierarchyError::Internal(format!(
                                "substitution for {name} did not resolve to a number"
                            ))
                        })?
                    }
                    None => GaussRat::zero(),
                };
                values.push(value);
            }
            SolveOutcome::Solved(ConstantVector::new(values))
        }
        Elimination::Infeasible { reason } => SolveOutcome::Infeasible { reason },
        Elimination::Inconclusive { reason } => SolveOutcome::Inconclusive { reason },
    })
}

enum Elimination {
    Solved(BTreeMap<String, SymPoly>),
    Infeasible { reason: String },
    Inconclusive { reason: String },
}

fn apply_subs(e: &SymPoly, subs: &BTreeMap<String, SymPoly>) -> SymPoly {
    let mut out = e.clone();
    for (name, value) in subs {
        out = out.substitute_poly(name, value);
    }
    out
}

fn constant_index(name: &str) -> Option<u32> {
    name.strip_prefix('C').and_then(|rest| rest.parse().ok())
}

/// Add `name -> value` to the substitution table, re-normalizing existing
/// entries so every stored value mentions only un-eliminated unknowns.
fn extend_subs(subs: &mut BTreeMap<String, SymPoly>, name: String, value: SymPoly) {
    for existing in subs.values_mut() {
        *existing = existing.substitute_poly(&name, &value);
    }
    subs.insert(name, value);
}

fn eliminate(
    equations: &[SymPoly],
    start: usize,
    mut subs: BTreeMap<String, SymPoly>,
    branches_used: &mut u32,
) -> Result<Elimination, HierarchyError> {
    let mut idx = start;
    while idx < equations.len() {
        let e = apply_subs(&equations[idx], &subs);
        idx += 1;
        if e.is_zero() {
            continue;
        }
        if let Some(value) = e.constant_value() {
            return Ok(Elimination::Infeasible {
                reason: format!("equation {idx} reduced to {value} = 0"),
            });
        }
        if e.total_degree() <= 1 {
            let pivot = e
                .vars()
                .iter()
                .filter(|v| !e.coeff_of(v, 1).is_zero())
                .min_by_key(|v| constant_index(v.as_str()).unwrap_or(u32::MAX))
                .cloned()
                .ok_or_else(|| {
                    HierarchyError::Internal("affine equation with no unknown".into())
                })?;
            let coeff = e
                .coeff_of(&pivot, 1)
                .constant_value()
                .ok_or_else(|| {
                    HierarchyError::Internal("non-constant linear coefficient".into())
                })?;
            let rest = e.substitute_poly(&pivot, &SymPoly::zero());
            let inv = GaussRat::one().checked_div(&coeff).map_err(|_| {
                HierarchyError::Internal("zero pivot coefficient".into())
            })?;
            let value = rest.neg().scale(&inv);
            extend_subs(&mut subs, pivot, value);
            continue;
        }
        // Defensive branch: a univariate quadratic can be split exactly.
        let vars = e.vars().to_vec();
        if vars.len() == 1 && e.degree_in(&vars[0]) == 2 {
            let name = &vars[0];
            let a = e.coeff_of(name, 2).constant_value();
            let b = e.coeff_of(name, 1).constant_value();
            let c = e.coeff_of(name, 0).constant_value();
            if let (Some(a), Some(b), Some(c)) = (a, b, c) {
                let four_ac = (&a * &c).scale(&BigRational::from_integer(4.into()));
                let disc = &(&b * &b) - &four_ac;
                let root = match disc.sqrt() {
                    Some(r) => r,
                    None => {
                        return Ok(Elimination::Infeasible {
                            reason: format!(
                                "equation {idx}: discriminant {disc} has no exact square root"
                            ),
                        })
                    }
                };
                let two_a_inv = GaussRat::one()
                    .checked_div(&(&a + &a))
                    .expect("leading coefficient nonzero");
                let minus_b = -&b;
                let mut last_reason = None;
                for signed in [&minus_b + &root, &minus_b - &root] {
                    *branches_used += 1;
                    if *branches_used > BRANCH_BOUND {
                        return Ok(Elimination::Inconclusive {
                            reason: format!("branch bound {BRANCH_BOUND} exceeded"),
                        });
                    }
                    let candidate = &signed * &two_a_inv;
                    let mut branch_subs = subs.clone();
                    extend_subs(&mut branch_subs, name.clone(), SymPoly::constant(candidate));
                    match eliminate(equations, idx, branch_subs, branches_used)? {
                        Elimination::Solved(s) => return Ok(Elimination::Solved(s)),
                        Elimination::Infeasible { reason } => last_reason = Some(reason),
                        inc @ Elimination::Inconclusive { .. } => return Ok(inc),
                    }
                }
                return Ok(Elimination::Infeasible {
                    reason: last_reason.unwrap_or_else(|| "both branches failed".into()),
                });
            }
        }
        return Ok(Elimination::Inconclusive {
            reason: format!(
                "equation {idx} is nonlinear of degree {} in {} unknowns",
                e.total_degree(),
                vars.len()
            ),
        });
    }
    Ok(Elimination::Solved(subs))
}

/// Check `f_k = g_k = 0` for `m+1 <= k <= m+depth`, with constants past the
/// given vector set to zero. Requires the pair to be stationary at `m`.
pub fn propagation_check(
    p: &Laurent<GaussRat>,
    q: &Laurent<GaussRat>,
    m: u32,
    c: &ConstantVector,
    depth: u32,
    k_order: i64,
) -> Result<bool, HierarchyError> {
    let base = stationary_residual(p, q, m, c, k_order)?;
    if !base.is_zero {
        return Err(HierarchyError::NotStationary(
            base.first_nonzero
                .unwrap_or_else(|| "stationary residual is nonzero".into()),
        ));
    }
    let input_cutoff = p.cutoff().min(q.cutoff());
    for k in m + 1..=m + depth {
        let pair = compute_fg(k)?;
        let subs = c.substitution((k - 1) as usize);
        for poly in [&pair.f, &pair.g] {
            let series = eval_diffpoly_numeric(&poly.substitute_constants(&subs), p, q)?;
            require_depth(&series, input_cutoff, k_order)?;
            if !series.truncate(k_order).is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::csc_series;

    fn half_qd() -> DiffPoly {
        DiffPoly::qd(1).scale(&GaussRat::ratio(1, 2))
    }

    #[test]
    fn seeds_and_first_steps() {
        let p1 = compute_fg(1).unwrap();
        assert_eq!(p1.f, DiffPoly::q().scale(&GaussRat::ratio_i(-1, 1)));
        assert_eq!(p1.g, DiffPoly::p().scale(&GaussRat::ratio_i(1, 1)));
        assert!(p1.constants_used.is_empty());

        let p2 = compute_fg(2).unwrap();
        let c1 = SymPoly::symbol("C1");
        let f2 = half_qd().sub(&DiffPoly::q().scale_sym(&c1.scale(&GaussRat::ratio_i(1, 1))));
        assert_eq!(p2.f, f2);
        let g2 = DiffPoly::pd(1)
            .scale(&GaussRat::ratio(1, 2))
            .add(&DiffPoly::p().scale_sym(&c1.scale(&GaussRat::ratio_i(1, 1))));
        assert_eq!(p2.g, g2);
        assert_eq!(p2.constants_used, vec!["C1".to_string()]);
    }

    #[test]
    fn third_pair_printed_form() {
        let p3 = compute_fg(3).unwrap();
        let c1 = SymPoly::symbol("C1");
        let c2 = SymPoly::symbol("C2");
        let f3 = DiffPoly::qd(2)
            .scale(&GaussRat::ratio_i(1, 4))
            .sub(&DiffPoly::p().mul(&DiffPoly::q()).mul(&DiffPoly::q()).scale(&GaussRat::ratio_i(1, 2)))
            .add(&DiffPoly::qd(1).scale_sym(&c1.scale(&GaussRat::ratio(1, 2))))
            .sub(&DiffPoly::q().scale_sym(&c2.scale(&GaussRat::ratio_i(1, 1))));
        assert_eq!(p3.f, f3);
        let g3 = DiffPoly::pd(2)
            .scale(&GaussRat::ratio_i(-1, 4))
            .add(&DiffPoly::q().mul(&DiffPoly::p()).mul(&DiffPoly::p()).scale(&GaussRat::ratio_i(1, 2)))
            .add(&DiffPoly::pd(1).scale_sym(&c1.scale(&GaussRat::ratio(1, 2))))
            .add(&DiffPoly::p().scale_sym(&c2.scale(&GaussRat::ratio_i(1, 1))));
        assert_eq!(p3.g, g3);
    }

    #[test]
    fn csc_stationary_at_order_two() {
        let s = csc_series(&GaussRat::one(), 30);
        let c = ConstantVector::new(vec![GaussRat::zero(), GaussRat::ratio(-1, 4)]);
        let verdict = stationary_residual(&s, &s, 2, &c, 20).unwrap();
        assert!(verdict.is_zero, "{:?}", verdict.first_nonzero);

        let wrong = ConstantVector::zeros(2);
        let verdict = stationary_residual(&s, &s, 2, &wrong, 20).unwrap();
        assert!(!verdict.is_zero);
        let note = verdict.first_nonzero.unwrap();
        assert_eq!(note, "f: coefficient -1/4*i at x^-1");
    }

    #[test]
    fn zero_series_always_stationary() {
        let z: Laurent<GaussRat> = Laurent::zero_to(25);
        let verdict =
            stationary_residual(&z, &z, 4, &ConstantVector::zeros(4), 15).unwrap();
        assert!(verdict.is_zero);
    }

    #[test]
    fn solve_csc_order_two() {
        let s = csc_series(&GaussRat::one(), 30);
        match solve_constants(&s, &s, 2, 20).unwrap() {
            SolveOutcome::Solved(c) => {
                assert_eq!(c.values(), &[GaussRat::zero(), GaussRat::ratio(-1, 4)]);
            }
            other => panic!("expected solution, got {other:?}"),
        }
    }

    #[test]
    fn mismatched_scales_infeasible() {
        let p = csc_series(&GaussRat::one(), 30);
        let q = csc_series(&GaussRat::from_int(2), 30);
        for m in 1..=4 {
            match solve_constants(&p, &q, m, 18).unwrap() {
                SolveOutcome::Infeasible { .. } => {}
                other => panic!("m={m}: expected infeasible, got {other:?}"),
            }
        }
    }

    #[test]
    fn propagation_from_csc() {
        let s = csc_series(&GaussRat::one(), 34);
        let c = ConstantVector::new(vec![GaussRat::zero(), GaussRat::ratio(-1, 4)]);
        assert!(propagation_check(&s, &s, 2, &c, 2, 18).unwrap());

        let with_c3 = ConstantVector::new(vec![
            GaussRat::zero(),
            GaussRat::ratio(-1, 4),
            GaussRat::one(),
        ]);
        assert!(!propagation_check(&s, &s, 2, &with_c3, 2, 18).unwrap());

        let not_stationary = ConstantVector::zeros(2);
        assert!(matches!(
            propagation_check(&s, &s, 2, &not_stationary, 2, 18),
            Err(HierarchyError::NotStationary(_))
        ));
    }

    #[test]
    fn quadratic_fallback_branches() {
        // (C1 - 1)(C1 - 3) = 0 then C1 = 1: the first root in deterministic
        // order is 3, so the solver must backtrack to reach the solution.
        let c1 = SymPoly::symbol("C1");
        let quad = c1
            .mul(&c1)
            .add(&c1.scale(&GaussRat::from_int(-4)))
            .add(&SymPoly::constant(GaussRat::from_int(3)));
        let pin = c1.add(&SymPoly::constant(GaussRat::from_int(-1)));
        let mut used = 0;
        match eliminate(&[quad.clone(), pin], 0, BTreeMap::new(), &mut used).unwrap() {
            Elimination::Solved(subs) => {
                assert_eq!(
                    subs.get("C1").and_then(|s| s.constant_value()),
                    Some(GaussRat::one())
                );
            }
            _ => panic!("expected solved"),
        }
        assert!(used >= 2);

        // irrational roots are correctly reported as infeasible over exact
        // Gaussian rationals
        let irr = c1.mul(&c1).add(&SymPoly::constant(GaussRat::from_int(-2)));
        let mut used = 0;
        match eliminate(&[irr], 0, BTreeMap::new(), &mut used).unwrap() {
            Elimination::Infeasible { reason } => {
                assert!(reason.contains("square root"), "{reason}");
            }
            _ => panic!("expected infeasible"),
        }
    }
}
