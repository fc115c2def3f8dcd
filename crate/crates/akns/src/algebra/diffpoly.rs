use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num::BigRational;
use thiserror::Error;

use super::gaussrat::GaussRat;
use super::sympoly::SymPoly;

/// Monomial in `p, q, p', q', ..., p^(j), q^(j)`: maps derivative order to
/// exponent, empty maps meaning the ring unit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffMono {
    p: BTreeMap<u32, u32>,
    q: BTreeMap<u32, u32>,
}

impl DiffMono {
    pub fn one() -> Self {
        DiffMono::default()
    }

    pub fn var_p(order: u32) -> Self {
        let mut m = DiffMono::default();
        m.p.insert(order, 1);
        m
    }

    pub fn var_q(order: u32) -> Self {
        let mut m = DiffMono::default();
        m.q.insert(order, 1);
        m
    }

    pub fn is_one(&self) -> bool {
        self.p.is_empty() && self.q.is_empty()
    }

    pub fn mul(&self, rhs: &DiffMono) -> DiffMono {
        let mut out = self.clone();
        for (&j, &e) in &rhs.p {
            *out.p.entry(j).or_insert(0) += e;
        }
        for (&j, &e) in &rhs.q {
            *out.q.entry(j).or_insert(0) += e;
        }
        out
    }

    /// Total degree: number of p/q factors counted with multiplicity.
    pub fn degree(&self) -> u32 {
        self.p.values().sum::<u32>() + self.q.values().sum::<u32>()
    }

    /// Weight grading: `p^(j)` and `q^(j)` both weigh `j + 1`.
    pub fn weight(&self) -> u32 {
        let w = |m: &BTreeMap<u32, u32>| m.iter().map(|(&j, &e)| (j + 1) * e).sum::<u32>();
        w(&self.p) + w(&self.q)
    }

    /// q-degree minus p-degree; the hierarchy's f_k are homogeneous of
    /// charge +1 and the g_k of charge -1.
    pub fn charge(&self) -> i64 {
        self.q.values().sum::<u32>() as i64 - self.p.values().sum::<u32>() as i64
    }

    pub fn max_order(&self) -> u32 {
        let top = |m: &BTreeMap<u32, u32>| m.keys().next_back().copied().unwrap_or(0);
        top(&self.p).max(top(&self.q))
    }

    pub fn p_exps(&self) -> &BTreeMap<u32, u32> {
        &self.p
    }

    pub fn q_exps(&self) -> &BTreeMap<u32, u32> {
        &self.q
    }

    /// Exponents interleaved as p, q, p', q', ... up to `len` orders.
    fn interleaved(&self, len: u32) -> impl Iterator<Item = u32> + '_ {
        (0..len).flat_map(move |j| {
            [
                self.p.get(&j).copied().unwrap_or(0),
                self.q.get(&j).copied().unwrap_or(0),
            ]
        })
    }
}

/// Graded lexicographic: total degree first, then the interleaved exponent
/// vector with lower derivative orders in front and `p^(j)` before `q^(j)`.
impl Ord for DiffMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let len = self.max_order().max(other.max_order()) + 1;
            self.interleaved(len).cmp(other.interleaved(len))
        })
    }
}

impl PartialOrd for DiffMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DiffMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        let all = self
            .p
            .iter()
            .map(|(&j, &e)| ('p', j, e))
            .chain(self.q.iter().map(|(&j, &e)| ('q', j, e)));
        // deterministic factor order: by derivative order, p before q
        let mut factors: Vec<(char, u32, u32)> = all.collect();
        factors.sort_by_key(|&(v, j, _)| (j, v));
        for (v, j, e) in factors {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            write!(f, "{v}")?;
            if j > 0 {
                write!(f, "^({j})")?;
            }
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffMono({self})")
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DiffPolyError {
    #[error("not a total derivative: no antiderivative can produce {witness}")]
    NotExact { witness: String },
}

/// Differential polynomial: finite sum of [`DiffMono`] with [`SymPoly`]
/// coefficients (so the arbitrary constants C_k and the spectral parameter z
/// ride along symbolically).
#[derive(Clone, PartialEq, Default)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMono, SymPoly>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn constant(c: SymPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(DiffMono::one(), c);
        }
        DiffPoly { terms }
    }

    pub fn p() -> Self {
        DiffPoly::from_mono(DiffMono::var_p(0))
    }

    pub fn q() -> Self {
        DiffPoly::from_mono(DiffMono::var_q(0))
    }

    /// `p^(order)` as a polynomial.
    pub fn pd(order: u32) -> Self {
        DiffPoly::from_mono(DiffMono::var_p(order))
    }

    /// `q^(order)` as a polynomial.
    pub fn qd(order: u32) -> Self {
        DiffPoly::from_mono(DiffMono::var_q(order))
    }

    pub fn from_mono(m: DiffMono) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, SymPoly::one());
        DiffPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMono, &SymPoly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of the empty monomial.
    pub fn constant_term(&self) -> SymPoly {
        self.terms
            .get(&DiffMono::one())
            .cloned()
            .unwrap_or_else(SymPoly::zero)
    }

    pub fn max_derivative_order(&self) -> u32 {
        self.terms.keys().map(DiffMono::max_order).max().unwrap_or(0)
    }

    fn insert(&mut self, m: DiffMono, c: SymPoly) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &DiffPoly) -> DiffPoly {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn mul(&self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.scale(c)))
                .collect(),
        }
    }

    pub fn scale_sym(&self, s: &SymPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.mul(s));
        }
        out
    }

    /// Total x-derivative via the Leibniz rule; constant symbols are
    /// annihilated.
    pub fn derive(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for (&j, &e) in &m.p {
                let mut d = m.clone();
                if e == 1 {
                    d.p.remove(&j);
                } else {
                    d.p.insert(j, e - 1);
                }
                *d.p.entry(j + 1).or_insert(0) += 1;
                out.insert(d, c.scale(&GaussRat::from_int(e as i64)));
            }
            for (&j, &e) in &m.q {
                let mut d = m.clone();
                if e == 1 {
                    d.q.remove(&j);
                } else {
                    d.q.insert(j, e - 1);
                }
                *d.q.entry(j + 1).or_insert(0) += 1;
                out.insert(d, c.scale(&GaussRat::from_int(e as i64)));
            }
        }
        out
    }

    /// Formal integration: the unique antiderivative with zero constant
    /// term, or an error naming a witness monomial when none exists.
    ///
    /// Exactness is decidable because derivation preserves degree and raises
    /// weight by one: each (degree, weight) stratum of the input is the image
    /// of the finite candidate space of monomials with the same degree and
    /// weight minus one, so a linear solve settles it.
    pub fn integrate(&self) -> Result<DiffPoly, DiffPolyError> {
        let mut strata: BTreeMap<(u32, u32), Vec<(&DiffMono, &SymPoly)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            strata
                .entry((m.degree(), m.weight()))
                .or_default()
                .push((m, c));
        }
        let mut out = DiffPoly::zero();
        for ((deg, wgt), part) in strata {
            if wgt == 0 || wgt - 1 < deg {
                // no monomial of this degree fits in weight wgt - 1
                return Err(DiffPolyError::NotExact {
                    witness: part[0].0.to_string(),
                });
            }
            let cands = monomials_with(deg, wgt - 1);
            // rows: target monomial -> per-candidate rational entries
            let mut rows: BTreeMap<DiffMono, BTreeMap<usize, BigRational>> = BTreeMap::new();
            for (ci, cand) in cands.iter().enumerate() {
                for (m, c) in DiffPoly::from_mono(cand.clone()).derive().terms {
                    let r = c
                        .constant_value()
                        .expect("derivative of a plain monomial has numeric coefficients")
                        .re()
                        .clone();
                    rows.entry(m).or_default().insert(ci, r);
                }
            }
            for (m, _) in &part {
                rows.entry((*m).clone()).or_default();
            }
            let targets: Vec<&DiffMono> = rows.keys().collect();
            let mut a: Vec<BTreeMap<usize, BigRational>> = rows.values().cloned().collect();
            let mut b: Vec<SymPoly> = targets
                .iter()
                .map(|m| {
                    part.iter()
                        .find(|(pm, _)| pm == m)
                        .map(|(_, c)| (*c).clone())
                        .unwrap_or_else(SymPoly::zero)
                })
                .collect();
            let witness: Vec<String> = targets.iter().map(|m| m.to_string()).collect();
            let x = solve_rational_system(&mut a, &mut b, cands.len(), &witness)?;
            for (ci, coeff) in x {
                out.insert(cands[ci].clone(), coeff);
            }
        }
        debug_assert!(out.derive().sub(self).is_zero());
        Ok(out)
    }

    /// Substitute numeric values for constant symbols in every coefficient.
    pub fn substitute_constants(&self, values: &BTreeMap<String, GaussRat>) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out.insert(m.clone(), c.substitute(values));
        }
        out
    }
}

/// Gaussian elimination of `A x = b` with rational matrix and [`SymPoly`]
/// right-hand side. Returns the pivot solution (free candidates zero), or a
/// witness row that is inconsistent.
fn solve_rational_system(
    a: &mut [BTreeMap<usize, BigRational>],
    b: &mut [SymPoly],
    ncols: usize,
    row_names: &[String],
) -> Result<Vec<(usize, SymPoly)>, DiffPolyError> {
    let nrows = a.len();
    let mut pivot_of_col: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(sel) = (rank..nrows).find(|&r| a[r].get(&col).is_some_and(|v| !num::Zero::is_zero(v))) else {
            continue;
        };
        a.swap(rank, sel);
        b.swap(rank, sel);
        let inv = a[rank][&col].recip();
        for v in a[rank].values_mut() {
            *v *= &inv;
        }
        b[rank] = b[rank].scale_rat(&inv);
        for r in 0..nrows {
            if r != rank {
                let Some(factor) = a[r].get(&col).cloned() else {
                    continue;
                };
                if num::Zero::is_zero(&factor) {
                    continue;
                }
                let pivot_row = a[rank].clone();
                for (c, v) in pivot_row {
                    let entry = a[r].entry(c).or_insert_with(num::Zero::zero);
                    *entry -= &factor * &v;
                }
                a[r].retain(|_, v| !num::Zero::is_zero(v));
                let delta = b[rank].scale_rat(&factor);
                b[r] = b[r].sub(&delta);
            }
        }
        pivot_of_col.insert(col, rank);
        rank += 1;
    }
    for r in rank..nrows {
        if !b[r].is_zero() {
            return Err(DiffPolyError::NotExact {
                witness: row_names[r].clone(),
            });
        }
    }
    Ok(pivot_of_col
        .into_iter()
        .map(|(col, row)| (col, b[row].clone()))
        .collect())
}

/// All monomials of the given total degree and weight.
fn monomials_with(degree: u32, weight: u32) -> Vec<DiffMono> {
    // orders listed nondecreasing; each factor of order j contributes j+1 weight
    fn parts(total: u32, count: u32, min_order: u32, acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if count == 0 {
            if total == 0 {
                out.push(acc.clone());
            }
            return;
        }
        let mut j = min_order;
        while (j + 1) * count <= total {
            acc.push(j);
            parts(total - (j + 1), count - 1, j, acc, out);
            acc.pop();
            j += 1;
        }
    }
    let mut out = Vec::new();
    for dp in 0..=degree {
        let dq = degree - dp;
        for wp in 0..=weight {
            let wq = weight - wp;
            let mut pp = Vec::new();
            parts(wp, dp, 0, &mut Vec::new(), &mut pp);
            let mut qq = Vec::new();
            parts(wq, dq, 0, &mut Vec::new(), &mut qq);
            for pv in &pp {
                for qv in &qq {
                    let mut m = DiffMono::default();
                    for &j in pv {
                        *m.p.entry(j).or_insert(0) += 1;
                    }
                    for &j in qv {
                        *m.q.entry(j).or_insert(0) += 1;
                    }
                    out.push(m);
                }
            }
        }
    }
    out
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let cs = diff_coeff_string(c);
            let (neg, body) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
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
            if m.is_one() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{body} * {m}")?;
            }
        }
        Ok(())
    }
}

/// Coefficient rendering for a [`DiffPoly`] term: multi-term polynomials get
/// parentheses so the top-level `+`/`-` separators stay unambiguous.
fn diff_coeff_string(c: &SymPoly) -> String {
    let n = c.terms().count();
    let s = c.to_string();
    if n > 1 {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leibniz_on_pq() {
        let d = DiffPoly::p().mul(&DiffPoly::q()).derive();
        let want = DiffPoly::pd(1)
            .mul(&DiffPoly::q())
            .add(&DiffPoly::p().mul(&DiffPoly::qd(1)));
        assert_eq!(d, want);
    }

    #[test]
    fn constants_are_annihilated() {
        let c1 = SymPoly::symbol("C1");
        let f = DiffPoly::p().mul(&DiffPoly::p()).scale_sym(&c1);
        let d = f.derive();
        // 2*C1*p*p'
        let want = DiffPoly::p()
            .mul(&DiffPoly::pd(1))
            .scale_sym(&c1)
            .scale(&GaussRat::from_int(2));
        assert_eq!(d, want);
    }

    #[test]
    fn integrate_product_rule() {
        let h = DiffPoly::p()
            .mul(&DiffPoly::qd(1))
            .add(&DiffPoly::pd(1).mul(&DiffPoly::q()));
        let res = h.integrate().unwrap();
        assert_eq!(res, DiffPoly::p().mul(&DiffPoly::q()));
    }

    #[test]
    fn integrate_rejects_pq() {
        let err = DiffPoly::p().mul(&DiffPoly::q()).integrate().unwrap_err();
        assert_eq!(
            err,
            DiffPolyError::NotExact {
                witness: "p * q".to_string()
            }
        );
    }

    #[test]
    fn monomial_order_is_graded() {
        let q2 = DiffMono::var_q(2);
        let q = DiffMono::var_q(0);
        let pqq = DiffMono::var_p(0).mul(&DiffMono::var_q(0)).mul(&DiffMono::var_q(0));
        assert!(q2 < q, "higher derivative sorts first within a degree");
        assert!(q < pqq, "degree dominates");
    }

    #[test]
    fn display_smoke() {
        let f = DiffPoly::qd(2)
            .scale(&GaussRat::new(
                num::BigRational::new(0.into(), 1.into()),
                num::BigRational::new(1.into(), 4.into()),
            ))
            .add(&DiffPoly::p().mul(&DiffPoly::q()).mul(&DiffPoly::q()).scale(&GaussRat::ratio_i(-1, 2)));
        assert_eq!(f.to_string(), "1/4*i * q^(2) - 1/2*i * p * q^2");
    }
}
