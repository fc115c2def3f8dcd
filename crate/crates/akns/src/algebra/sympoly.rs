use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::BigRational;

use super::gaussrat::GaussRat;

/// Multivariate polynomial in named constant symbols (`C1`, `z`, `phi`, ...)
/// with [`GaussRat`] coefficients.
///
/// The symbol table is kept in canonical form: natural-sorted names, no
/// symbol that is unused by every term. Together with the absence of zero
/// coefficients this makes derived equality semantic: two polynomials are
/// `==` exactly when they are the same polynomial, regardless of how they
/// were assembled.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymPoly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Vec<u32>, GaussRat>,
}

impl SymPoly {
    pub fn zero() -> Self {
        SymPoly {
            vars: Arc::new(Vec::new()),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: GaussRat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        SymPoly {
            vars: Arc::new(Vec::new()),
            terms,
        }
    }

    pub fn one() -> Self {
        SymPoly::constant(GaussRat::one())
    }

    pub fn symbol(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], GaussRat::one());
        SymPoly {
            vars: Arc::new(vec![name.to_string()]),
            terms,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// The value if this polynomial is constant (including zero).
    pub fn constant_value(&self) -> Option<GaussRat> {
        if self.vars.is_empty() {
            Some(
                self.terms
                    .get(&Vec::new())
                    .cloned()
                    .unwrap_or_else(GaussRat::zero),
            )
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Degree in one symbol; 0 if the symbol is absent.
    pub fn degree_in(&self, name: &str) -> u32 {
        match self.vars.iter().position(|v| v == name) {
            Some(idx) => self.terms.keys().map(|e| e[idx]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Coefficient polynomial of `name^power` (collecting all other symbols).
    pub fn coeff_of(&self, name: &str, power: u32) -> SymPoly {
        let Some(idx) = self.vars.iter().position(|v| v == name) else {
            return if power == 0 { self.clone() } else { SymPoly::zero() };
        };
        let mut terms = BTreeMap::new();
        for (exps, c) in &self.terms {
            if exps[idx] == power {
                let mut e = exps.clone();
                e[idx] = 0;
                add_term(&mut terms, e, c.clone());
            }
        }
        SymPoly {
            vars: self.vars.clone(),
            terms,
        }
        .normalized()
    }

    pub fn neg(&self) -> SymPoly {
        SymPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, rhs: &SymPoly) -> SymPoly {
        let (vars, left, right) = align(self, rhs);
        let mut terms = left;
        for (e, c) in right {
            add_term(&mut terms, e, c);
        }
        SymPoly { vars, terms }.normalized()
    }

    pub fn sub(&self, rhs: &SymPoly) -> SymPoly {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &SymPoly) -> SymPoly {
        if self.is_zero() || rhs.is_zero() {
            return SymPoly::zero();
        }
        let (vars, left, right) = align(self, rhs);
        let mut terms: BTreeMap<Vec<u32>, GaussRat> = BTreeMap::new();
        for (ea, ca) in &left {
            for (eb, cb) in &right {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                add_term(&mut terms, e, ca * cb);
            }
        }
        SymPoly { vars, terms }.normalized()
    }

    pub fn scale(&self, c: &GaussRat) -> SymPoly {
        if c.is_zero() {
            return SymPoly::zero();
        }
        SymPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn scale_rat(&self, r: &BigRational) -> SymPoly {
        self.scale(&GaussRat::new(r.clone(), num::Zero::zero()))
    }

    /// Replace the listed symbols by constants; others stay symbolic.
    pub fn substitute(&self, values: &BTreeMap<String, GaussRat>) -> SymPoly {
        if self.vars.iter().all(|v| !values.contains_key(v)) {
            return self.clone();
        }
        let mut out = SymPoly::zero();
        for (exps, c) in &self.terms {
            let mut coeff = c.clone();
            let mut mono = SymPoly::one();
            for (idx, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match values.get(&self.vars[idx]) {
                    Some(v) => {
                        for _ in 0..e {
                            coeff = &coeff * v;
                        }
                    }
                    None => {
                        let s = SymPoly::symbol(&self.vars[idx]);
                        for _ in 0..e {
                            mono = mono.mul(&s);
                        }
                    }
                }
            }
            out = out.add(&mono.scale(&coeff));
        }
        out
    }

    /// Replace one symbol by a polynomial.
    pub fn substitute_poly(&self, name: &str, value: &SymPoly) -> SymPoly {
        let Some(idx) = self.vars.iter().position(|v| v == name) else {
            return self.clone();
        };
        let mut out = SymPoly::zero();
        for (exps, c) in &self.terms {
            let mut term = SymPoly::constant(c.clone());
            for (j, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if j == idx {
                    value.clone()
                } else {
                    SymPoly::symbol(&self.vars[j])
                };
                for _ in 0..e {
                    term = term.mul(&base);
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Canonical form: drop zero coefficients and unused symbols.
    fn normalized(mut self) -> SymPoly {
        self.terms.retain(|_, c| !c.is_zero());
        if self.terms.is_empty() {
            return SymPoly::zero();
        }
        let arity = self.vars.len();
        let used: Vec<bool> = (0..arity)
            .map(|i| self.terms.keys().any(|e| e[i] != 0))
            .collect();
        if used.iter().all(|&u| u) {
            return self;
        }
        let vars: Vec<String> = self
            .vars
            .iter()
            .zip(&used)
            .filter(|(_, &u)| u)
            .map(|(v, _)| v.clone())
            .collect();
        let terms = self
            .terms
            .into_iter()
            .map(|(e, c)| {
                let e2: Vec<u32> = e
                    .iter()
                    .zip(&used)
                    .filter(|(_, &u)| u)
                    .map(|(&x, _)| x)
                    .collect();
                (e2, c)
            })
            .collect();
        SymPoly {
            vars: Arc::new(vars),
            terms,
        }
    }

    /// Iterate terms as (exponents-by-var-name, coefficient).
    pub fn terms(&self) -> impl Iterator<Item = (Vec<(&str, u32)>, &GaussRat)> {
        self.terms.iter().map(move |(e, c)| {
            let named: Vec<(&str, u32)> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (self.vars[i].as_str(), x))
                .collect();
            (named, c)
        })
    }
}

fn add_term(terms: &mut BTreeMap<Vec<u32>, GaussRat>, e: Vec<u32>, c: GaussRat) {
    use std::collections::btree_map::Entry;
    match terms.entry(e) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            let sum = o.get() + &c;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

/// Natural comparison: digit runs compare numerically, so `C2 < C10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let ab = a.as_bytes();
    let bb = b.as_bytes();
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let na = a[si..i].trim_start_matches('0');
            let nb = b[sj..j].trim_start_matches('0');
            let cmp = na.len().cmp(&nb.len()).then_with(|| na.cmp(nb));
            if cmp != Ordering::Equal {
                return cmp;
            }
        } else {
            let cmp = ab[i].cmp(&bb[j]);
            if cmp != Ordering::Equal {
                return cmp;
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j))
}

/// Remap both polynomials onto the union symbol table.
fn align(
    a: &SymPoly,
    b: &SymPoly,
) -> (
    Arc<Vec<String>>,
    BTreeMap<Vec<u32>, GaussRat>,
    BTreeMap<Vec<u32>, GaussRat>,
) {
    if a.vars == b.vars || Arc::ptr_eq(&a.vars, &b.vars) {
        return (a.vars.clone(), a.terms.clone(), b.terms.clone());
    }
    let mut union: Vec<String> = a.vars.iter().cloned().collect();
    for v in b.vars.iter() {
        if !union.contains(v) {
            union.push(v.clone());
        }
    }
    union.sort_by(|x, y| natural_cmp(x, y));
    let remap = |p: &SymPoly| -> BTreeMap<Vec<u32>, GaussRat> {
        let positions: Vec<usize> = p
            .vars
            .iter()
            .map(|v| union.iter().position(|u| u == v).unwrap())
            .collect();
        p.terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = vec![0u32; union.len()];
                for (k, &x) in e.iter().enumerate() {
                    e2[positions[k]] = x;
                }
                (e2, c.clone())
            })
            .collect()
    };
    let ra = remap(a);
    let rb = remap(b);
    (Arc::new(union), ra, rb)
}

impl fmt::Display for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, coeff) in &self.terms {
            let has_vars = exps.iter().any(|&e| e != 0);
            let cs = coeff_string(coeff, has_vars);
            let (sign, body) = match cs.strip_prefix('-') {
                Some(rest) => ("-", rest.to_string()),
                None => ("+", cs),
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign == "-" {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{body}")?;
            let mut lead = !body.is_empty();
            for (idx, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if lead {
                    write!(f, "*")?;
                }
                lead = true;
                write!(f, "{}", self.vars[idx])?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Coefficient as it appears inside a term: `1` is suppressed before symbols,
/// mixed complex values are parenthesized so `+`/`-` stay unambiguous.
fn coeff_string(c: &GaussRat, has_vars: bool) -> String {
    if has_vars {
        if c.is_one() {
            return String::new();
        }
        if (-c).is_one() {
            return "-".to_string();
        }
    }
    let s = c.to_string();
    let mixed = !num::Zero::is_zero(c.re()) && !num::Zero::is_zero(c.im());
    if mixed {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Debug for SymPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64, d: i64) -> GaussRat {
        GaussRat::ratio(n, d)
    }

    #[test]
    fn constants_fold() {
        let five = SymPoly::constant(c(5, 1));
        let z = SymPoly::symbol("z");
        let p = five.add(&z).sub(&z);
        assert_eq!(p, SymPoly::constant(c(5, 1)));
        assert_eq!(p.constant_value(), Some(c(5, 1)));
    }

    #[test]
    fn natural_symbol_merge() {
        let a = SymPoly::symbol("C10");
        let b = SymPoly::symbol("C2");
        let sum = a.add(&b);
        assert_eq!(sum.vars(), &["C2".to_string(), "C10".to_string()]);
    }

    #[test]
    fn display_and_sign_folding() {
        let p = SymPoly::symbol("C1")
            .scale(&c(-1, 2))
            .add(&SymPoly::symbol("z").mul(&SymPoly::symbol("z")));
        assert_eq!(p.to_string(), "z^2 - 1/2*C1");
        let q = SymPoly::symbol("z").scale(&GaussRat::i());
        assert_eq!(q.to_string(), "i*z");
        let mixed = SymPoly::symbol("z").scale(&GaussRat::new(
            BigRational::new(1.into(), 2.into()),
            BigRational::new(1.into(), 3.into()),
        ));
        assert_eq!(mixed.to_string(), "(1/2+1/3*i)*z");
    }

    #[test]
    fn substitution() {
        // C1^2 * z + 3 at C1 = 2i -> -4z + 3
        let p = SymPoly::symbol("C1")
            .mul(&SymPoly::symbol("C1"))
            .mul(&SymPoly::symbol("z"))
            .add(&SymPoly::constant(c(3, 1)));
        let mut vals = BTreeMap::new();
        vals.insert("C1".to_string(), GaussRat::ratio_i(2, 1));
        let got = p.substitute(&vals);
        let want = SymPoly::symbol("z")
            .scale(&c(-4, 1))
            .add(&SymPoly::constant(c(3, 1)));
        assert_eq!(got, want);
    }

    #[test]
    fn coeff_extraction() {
        let p = SymPoly::symbol("C1")
            .scale(&c(2, 1))
            .add(&SymPoly::symbol("C2").mul(&SymPoly::symbol("C1")))
            .add(&SymPoly::constant(c(7, 1)));
        assert_eq!(p.degree_in("C1"), 1);
        let lin = p.coeff_of("C1", 1);
        assert_eq!(
            lin,
            SymPoly::constant(c(2, 1)).add(&SymPoly::symbol("C2"))
        );
        assert_eq!(p.coeff_of("C1", 0), SymPoly::constant(c(7, 1)));
    }
}
