//! Exact series generators for the example potentials: `1/sin`, the
//! Weierstrass `wp` function at its pole and at a half-period, and the
//! zeta-function combination used by the elliptic two-pole example.

use num::{BigInt, BigRational, One};

use super::laurent::{Laurent, SeriesError};
use crate::algebra::GaussRat;

/// Taylor series of `sin x` through order `k`.
pub fn sin_series(k: i64) -> Laurent<GaussRat> {
    assert!(k >= 0, "truncation order must be nonnegative");
    let mut out = Laurent::zero_to(k);
    let mut fact = BigInt::one();
    let mut m = 0i64;
    while 2 * m + 1 <= k {
        if m > 0 {
            fact *= BigInt::from(2 * m) * BigInt::from(2 * m + 1);
        }
        let mut c = GaussRat::one().scale(&BigRational::new(1.into(), fact.clone()));
        if m % 2 == 1 {
            c = -&c;
        }
        out.insert(2 * m + 1, c);
        m += 1;
    }
    out
}

/// `scale / sin x` through order `k`, by exact inversion of the sine series.
pub fn csc_series(scale: &GaussRat, k: i64) -> Laurent<GaussRat> {
    assert!(k >= 0, "truncation order must be nonnegative");
    // sin x = x * u(x^2) with u(0) = 1; invert u as a power series in x.
    let depth = (k + 1) as usize;
    let mut u = vec![BigRational::from_integer(0.into()); depth + 1];
    u[0] = BigRational::one();
    let mut fact = BigInt::from(1);
    let mut sign = 1i64;
    let mut m = 1i64;
    while (2 * m) as usize <= depth {
        fact *= BigInt::from(2 * m) * BigInt::from(2 * m + 1);
        sign = -sign;
        u[(2 * m) as usize] = BigRational::new(sign.into(), fact.clone());
        m += 1;
    }
    let mut v = vec![BigRational::from_integer(0.into()); depth + 1];
    v[0] = BigRational::one();
    for n in 1..=depth {
        let mut acc = BigRational::from_integer(0.into());
        for j in 1..=n {
            acc += &u[j] * &v[n - j];
        }
        v[n] = -acc;
    }
    let mut out = Laurent::zero_to(k);
    for (n, c) in v.iter().enumerate() {
        let order = n as i64 - 1;
        if order <= k {
            debug_assert!(order % 2 != 0 || c == &BigRational::from_integer(0.into()));
            out.insert(order, scale.scale(c));
        }
    }
    out
}

/// Invariants of a Weierstrass function together with a rational root `e2`
/// of the defining cubic, so all series arithmetic stays exact.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipticParams {
    g2: GaussRat,
    g3: GaussRat,
    e2: GaussRat,
}

impl EllipticParams {
    pub fn new(g2: GaussRat, g3: GaussRat, e2: GaussRat) -> Result<Self, SeriesError> {
        let residual = &(&e2 * &e2) * &e2;
        let residual = &residual.scale(&BigRational::from_integer(4.into()))
            - &(&(&g2 * &e2) + &g3);
        if !residual.is_zero() {
            return Err(SeriesError::BadEllipticParams {
                residual: residual.to_string(),
            });
        }
        Ok(EllipticParams { g2, g3, e2 })
    }

    pub fn g2(&self) -> &GaussRat {
        &self.g2
    }

    pub fn g3(&self) -> &GaussRat {
        &self.g3
    }

    pub fn e2(&self) -> &GaussRat {
        &self.e2
    }

    /// The lemniscatic choice used by the worked elliptic example:
    /// g2 = 4, g3 = 0, e2 = 1.
    pub fn lemniscatic() -> Self {
        EllipticParams::new(
            GaussRat::from_int(4),
            GaussRat::zero(),
            GaussRat::one(),
        )
        .expect("4*1 - 4*1 - 0 = 0")
    }
}

/// Laurent expansion of `wp(x)` at its pole: `x^-2 + sum c_k x^(2k-2)` with
/// `c_2 = g2/20`, `c_3 = g3/28`, and for `k >= 4`
/// `c_k = 3/((2k+1)(k-3)) * sum_{m=2}^{k-2} c_m c_{k-m}`.
pub fn wp_series(params: &EllipticParams, k: i64) -> Laurent<GaussRat> {
    assert!(k >= 0, "truncation order must be nonnegative");
    let kmax = ((k + 2) / 2).max(1) as usize;
    let mut c = vec![GaussRat::zero(); kmax + 1];
    if kmax >= 2 {
        c[2] = params.g2.scale(&BigRational::new(1.into(), 20.into()));
    }
    if kmax >= 3 {
        c[3] = params.g3.scale(&BigRational::new(1.into(), 28.into()));
    }
    for kk in 4..=kmax {
        let mut acc = GaussRat::zero();
        for m in 2..=kk - 2 {
            acc = &acc + &(&c[m] * &c[kk - m]);
        }
        let denom = BigInt::from(2 * kk as i64 + 1) * BigInt::from(kk as i64 - 3);
        c[kk] = acc.scale(&BigRational::new(3.into(), denom));
    }
    let mut out = Laurent::zero_to(k);
    out.insert(-2, GaussRat::one());
    for (kk, ck) in c.iter().enumerate().skip(2) {
        let order = 2 * kk as i64 - 2;
        if order <= k {
            out.insert(order, ck.clone());
        }
    }
    out
}

/// Taylor expansion of `wp` at a half-period, generated term by term from
/// `wp'' = 6 wp^2 - g2/2` with initial data `(e2, 0)`.
pub fn wp_taylor_at_halfperiod(params: &EllipticParams, k: i64) -> Laurent<GaussRat> {
    assert!(k >= 0, "truncation order must be nonnegative");
    let depth = k as usize;
    let mut a = vec![GaussRat::zero(); depth + 1];
    a[0] = params.e2.clone();
    for m in 0..depth.saturating_sub(1) {
        // (wp^2)_m from coefficients already fixed
        let mut sq = GaussRat::zero();
        for j in 0..=m {
            sq = &sq + &(&a[j] * &a[m - j]);
        }
        let mut rhs = sq.scale(&BigRational::from_integer(6.into()));
        if m == 0 {
            rhs = &rhs - &params.g2.scale(&BigRational::new(1.into(), 2.into()));
        }
        let denom = BigInt::from(m as i64 + 1) * BigInt::from(m as i64 + 2);
        a[m + 2] = rhs.scale(&BigRational::new(1.into(), denom));
    }
    let mut out = Laurent::zero_to(k);
    for (m, am) in a.iter().enumerate() {
        out.insert(m as i64, am.clone());
    }
    out
}

/// The elliptic example's pole data: `p = alpha * s`, `q = beta * s` where
/// `s = zeta(x) - zeta(x - w2) - zeta(w2)` expanded at `x = 0`. Requires
/// `alpha * beta` to be the square of a positive integer.
pub fn example2_pq(
    params: &EllipticParams,
    alpha: &GaussRat,
    beta: &GaussRat,
    k: i64,
) -> Result<(Laurent<GaussRat>, Laurent<GaussRat>), SeriesError> {
    assert!(k >= 0, "truncation order must be nonnegative");
    let product = alpha * beta;
    let n = product
        .perfect_square_root()
        .filter(|n| n > &BigInt::from(0))
        .ok_or_else(|| SeriesError::NotASquare {
            product: product.to_string(),
        })?;
    let _ = n;
    let s = example2_s(params, k);
    Ok((s.scale(alpha), s.scale(beta)))
}

/// The shared series `s` from the elliptic example, normalized to residue 1.
/// Built from `zeta' = -wp`: the regular part has derivative
/// `wp(x - w2) - (wp(x) - x^-2)` and vanishes at `x = 0` because zeta is odd.
pub fn example2_s(params: &EllipticParams, k: i64) -> Laurent<GaussRat> {
    let w = wp_series(params, k + 1);
    let h = wp_taylor_at_halfperiod(params, k + 1);
    let w_regular = w.sub(&Laurent::monomial(-2, GaussRat::one())).truncate(k + 1);
    let integrand = h.sub(&w_regular);
    let regular = integrand
        .integrate()
        .expect("even series has no residue");
    Laurent::monomial(-1, GaussRat::one())
        .add(&regular)
        .truncate(k)
}
