//! Truncated Laurent series with explicit truncation bookkeeping.
//!
//! A [`Laurent`] value represents a series whose coefficients are known
//! exactly for every exponent `<= cutoff`; everything above the cutoff is
//! unknown, not zero. Arithmetic propagates the cutoff pessimistically, so a
//! coefficient you can read out of a result is always exact.

use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use thiserror::Error;

use crate::algebra::{DiffPoly, GaussRat, SymPoly};

/// Cutoff used for exact values (constants, the zero series): effectively
/// infinite, but far enough from `i64::MAX` that shifting by term orders
/// cannot overflow.
pub const EXACT_CUTOFF: i64 = i64::MAX / 4;

pub trait Coeff: Clone + PartialEq + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale_rat(&self, r: &BigRational) -> Self;
}

impl Coeff for GaussRat {
    fn zero() -> Self {
        GaussRat::zero()
    }
    fn one() -> Self {
        GaussRat::one()
    }
    fn is_zero(&self) -> bool {
        GaussRat::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale_rat(&self, r: &BigRational) -> Self {
        GaussRat::scale(self, r)
    }
}

impl Coeff for SymPoly {
    fn zero() -> Self {
        SymPoly::zero()
    }
    fn one() -> Self {
        SymPoly::one()
    }
    fn is_zero(&self) -> bool {
        SymPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        SymPoly::add(self, other)
    }
    fn neg(&self) -> Self {
        SymPoly::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        SymPoly::mul(self, other)
    }
    fn scale_rat(&self, r: &BigRational) -> Self {
        SymPoly::scale_rat(self, r)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeriesError {
    /// Integrating a series with nonzero residue would produce a log term.
    #[error("logarithmic obstruction: residue {residue} at x^-1 is nonzero")]
    LogarithmicObstruction { residue: String },
    /// A computation needs coefficients beyond the available truncation.
    #[error("insufficient series depth: need coefficients through order {needed}, have them through {have}")]
    InsufficientDepth { needed: i64, have: i64 },
    /// A numeric result still contains a constant symbol.
    #[error("coefficient at order {order} is not a number: symbol {symbol} remains")]
    SymbolRemains { order: i64, symbol: String },
    /// Elliptic parameters failed their defining cubic.
    #[error("invalid elliptic data: 4*e2^3 - g2*e2 - g3 = {residual}, expected 0")]
    BadEllipticParams { residual: String },
    /// Example data whose product is not a positive perfect square.
    #[error("alpha*beta = {product} is not the square of a positive integer")]
    NotASquare { product: String },
}

/// Laurent series truncated at `cutoff`: coefficients for exponents
/// `<= cutoff` are exact (absent means zero), higher ones are unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent<C: Coeff> {
    coeffs: BTreeMap<i64, C>,
    cutoff: i64,
}

impl<C: Coeff> Laurent<C> {
    pub fn zero_to(cutoff: i64) -> Self {
        Laurent {
            coeffs: BTreeMap::new(),
            cutoff,
        }
    }

    /// An exactly-known constant (infinite cutoff).
    pub fn constant(value: C) -> Self {
        let mut coeffs = BTreeMap::new();
        if !value.is_zero() {
            coeffs.insert(0, value);
        }
        Laurent {
            coeffs,
            cutoff: EXACT_CUTOFF,
        }
    }

    /// A single exactly-known term `value * x^order`.
    pub fn monomial(order: i64, value: C) -> Self {
        let mut coeffs = BTreeMap::new();
        if !value.is_zero() {
            coeffs.insert(order, value);
        }
        Laurent {
            coeffs,
            cutoff: EXACT_CUTOFF,
        }
    }

    /// Build from a dense coefficient list starting at `min_order`; the
    /// cutoff is the last listed exponent.
    pub fn from_parts(min_order: i64, coeffs: Vec<C>) -> Self {
        let cutoff = min_order + coeffs.len() as i64 - 1;
        let mut map = BTreeMap::new();
        for (i, c) in coeffs.into_iter().enumerate() {
            if !c.is_zero() {
                map.insert(min_order + i as i64, c);
            }
        }
        Laurent {
            coeffs: map,
            cutoff,
        }
    }

    /// Dense `(min_order, coefficient list)` covering every known exponent
    /// from the first nonzero one up to the cutoff.
    pub fn to_parts(&self) -> (i64, Vec<C>) {
        match self.min_order() {
            None => (0, Vec::new()),
            Some(lo) => {
                let mut out = Vec::with_capacity((self.cutoff - lo + 1) as usize);
                for k in lo..=self.cutoff {
                    out.push(self.coeff(k));
                }
                (lo, out)
            }
        }
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Lowest exponent with a nonzero coefficient, if any is known.
    pub fn min_order(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Effective minimal order for truncation propagation: an all-zero
    /// series contributes nothing below its first unknown exponent.
    fn min_order_eff(&self) -> i64 {
        self.min_order().unwrap_or(self.cutoff.saturating_add(1))
    }

    /// Coefficient at exponent `k`; zero when absent. Only meaningful for
    /// `k <= cutoff`, use [`Laurent::known_coeff`] to distinguish.
    pub fn coeff(&self, k: i64) -> C {
        self.coeffs.get(&k).cloned().unwrap_or_else(C::zero)
    }

    pub fn known_coeff(&self, k: i64) -> Option<C> {
        if k > self.cutoff {
            None
        } else {
            Some(self.coeff(k))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Iterate stored nonzero terms in exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    pub fn insert(&mut self, k: i64, value: C) {
        if value.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, value);
        }
    }

    /// Restrict to exponents `<= new_cutoff` (never raises the cutoff).
    pub fn truncate(&self, new_cutoff: i64) -> Self {
        let cutoff = new_cutoff.min(self.cutoff);
        Laurent {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&k, _)| k <= cutoff)
                .map(|(&k, c)| (k, c.clone()))
                .collect(),
            cutoff,
        }
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Laurent<D> {
        let mut out = Laurent::zero_to(self.cutoff);
        for (k, c) in self.iter() {
            out.insert(k, f(c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let cutoff = self.cutoff.min(other.cutoff);
        let mut out = self.truncate(cutoff);
        for (k, c) in other.iter() {
            if k <= cutoff {
                out.insert(k, out.coeff(k).add(c));
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Laurent {
            coeffs: self.coeffs.iter().map(|(&k, c)| (k, c.neg())).collect(),
            cutoff: self.cutoff,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact truncated product. Output coefficient at order `m` needs every
    /// split `m = j + k` with `j` known in `self` and `k` known in `other`,
    /// so the cutoff is `min(self.cutoff + other.min, other.cutoff + self.min)`.
    pub fn mul(&self, other: &Self) -> Self {
        let cutoff = (self.cutoff.saturating_add(other.min_order_eff()))
            .min(other.cutoff.saturating_add(self.min_order_eff()));
        let mut out: Laurent<C> = Laurent::zero_to(cutoff);
        for (j, a) in self.iter() {
            for (k, b) in other.iter() {
                let m = j + k;
                if m <= cutoff {
                    out.insert(m, out.coeff(m).add(&a.mul(b)));
                }
            }
        }
        out
    }

    pub fn scale(&self, factor: &C) -> Self {
        let mut out = Laurent::zero_to(self.cutoff);
        for (k, c) in self.iter() {
            out.insert(k, c.mul(factor));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Laurent::constant(C::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Term-wise derivative; the cutoff drops by one.
    pub fn derive(&self) -> Self {
        let mut out = Laurent::zero_to(self.cutoff.saturating_sub(1).min(EXACT_CUTOFF));
        for (k, c) in self.iter() {
            if k != 0 {
                out.insert(k - 1, c.scale_rat(&BigRational::from_integer(k.into())));
            }
        }
        out
    }

    /// Term-wise antiderivative with zero integration constant; the cutoff
    /// rises by one. Fails when the residue is nonzero.
    pub fn integrate(&self) -> Result<Self, SeriesError> {
        let residue = self.coeff(-1);
        if !residue.is_zero() {
            return Err(SeriesError::LogarithmicObstruction {
                residue: residue.to_string(),
            });
        }
        let mut out = Laurent::zero_to(self.cutoff.saturating_add(1).min(EXACT_CUTOFF));
        for (k, c) in self.iter() {
            debug_assert!(k != -1);
            out.insert(
                k + 1,
                c.scale_rat(&BigRational::new(1.into(), (k + 1).into())),
            );
        }
        Ok(out)
    }
}

impl Laurent<GaussRat> {
    pub fn to_sympoly(&self) -> Laurent<SymPoly> {
        self.map(|c| SymPoly::constant(c.clone()))
    }
}

impl Laurent<SymPoly> {
    /// Demote to numeric coefficients; fails if any symbol survives.
    pub fn try_to_gaussrat(&self) -> Result<Laurent<GaussRat>, SeriesError> {
        let mut out = Laurent::zero_to(self.cutoff);
        for (k, c) in self.iter() {
            match c.constant_value() {
                Some(v) => out.insert(k, v),
                None => {
                    return Err(SeriesError::SymbolRemains {
                        order: k,
                        symbol: c.vars().first().cloned().unwrap_or_default(),
                    })
                }
            }
        }
        Ok(out)
    }
}

impl<C: Coeff> fmt::Display for Laurent<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.iter() {
            let cs = c.to_string();
            let inner_signs = cs[1..].contains(['+', '-', ' ']);
            let (neg, body) = if inner_signs {
                (false, format!("({cs})"))
            } else {
                match cs.strip_prefix('-') {
                    Some(rest) => (true, rest.to_string()),
                    None => (false, cs),
                }
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            match (body.as_str(), mono.is_empty()) {
                ("1", false) => write!(f, "{mono}")?,
                (_, true) => write!(f, "{body}")?,
                _ => write!(f, "{body}*{mono}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.cutoff < EXACT_CUTOFF {
            write!(f, " + O(x^{})", self.cutoff + 1)?;
        }
        Ok(())
    }
}

/// Substitute Laurent data for `p`, `q` in a differential polynomial,
/// carrying any constant symbols in the coefficients along symbolically.
pub fn eval_diffpoly(
    f: &DiffPoly,
    p: &Laurent<SymPoly>,
    q: &Laurent<SymPoly>,
) -> Laurent<SymPoly> {
    let max_ord = f.max_derivative_order();
    let mut p_der: Vec<Laurent<SymPoly>> = vec![p.clone()];
    let mut q_der: Vec<Laurent<SymPoly>> = vec![q.clone()];
    for j in 0..max_ord as usize {
        p_der.push(p_der[j].derive());
        q_der.push(q_der[j].derive());
    }
    let mut acc = Laurent::zero_to(EXACT_CUTOFF);
    for (mono, coeff) in f.terms() {
        let mut term = Laurent::constant(coeff.clone());
        for (&j, &e) in mono.p_exps() {
            term = term.mul(&p_der[j as usize].pow(e));
        }
        for (&j, &e) in mono.q_exps() {
            term = term.mul(&q_der[j as usize].pow(e));
        }
        acc = acc.add(&term);
    }
    acc
}

/// [`eval_diffpoly`] plus a depth guarantee: fails, naming the required
/// depth, when the inputs cannot support coefficients through `order`.
pub fn eval_diffpoly_to(
    f: &DiffPoly,
    p: &Laurent<SymPoly>,
    q: &Laurent<SymPoly>,
    order: i64,
) -> Result<Laurent<SymPoly>, SeriesError> {
    let out = eval_diffpoly(f, p, q);
    if out.cutoff() < order {
        let shortfall = order - out.cutoff();
        return Err(SeriesError::InsufficientDepth {
            needed: p.cutoff().min(q.cutoff()).saturating_add(shortfall),
            have: p.cutoff().min(q.cutoff()),
        });
    }
    Ok(out)
}

/// Numeric evaluation: all constant symbols must already be substituted.
/// Coefficients stay plain Gaussian rationals throughout, which is much
/// cheaper than lifting the series into the symbol ring.
pub fn eval_diffpoly_numeric(
    f: &DiffPoly,
    p: &Laurent<GaussRat>,
    q: &Laurent<GaussRat>,
) -> Result<Laurent<GaussRat>, SeriesError> {
    let mut consts = Vec::with_capacity(f.num_terms());
    for (_, coeff) in f.terms() {
        match coeff.constant_value() {
            Some(g) => consts.push(g),
            // leftover symbol: take the slow route so the error carries
            // the same shape as any other symbolic-residue conversion
            None => return eval_diffpoly(f, &p.to_sympoly(), &q.to_sympoly()).try_to_gaussrat(),
        }
    }
    let max_ord = f.max_derivative_order();
    let mut p_der: Vec<Laurent<GaussRat>> = vec![p.clone()];
    let mut q_der: Vec<Laurent<GaussRat>> = vec![q.clone()];
    for j in 0..max_ord as usize {
        p_der.push(p_der[j].derive());
        q_der.push(q_der[j].derive());
    }
    let mut acc = Laurent::zero_to(EXACT_CUTOFF);
    for ((mono, _), c) in f.terms().zip(consts) {
        let mut term = Laurent::constant(c);
        for (&j, &e) in mono.p_exps() {
            term = term.mul(&p_der[j as usize].pow(e));
        }
        for (&j, &e) in mono.q_exps() {
            term = term.mul(&q_der[j as usize].pow(e));
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}
