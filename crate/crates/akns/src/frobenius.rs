//! Local Frobenius solutions of the first-order spectral system
//!
//! ```text
//! i y1' - i q y2 = z y1
//! -i y2' + i p y1 = z y2
//! ```
//!
//! at a simple pole of (p, q), with the spectral parameter z carried as a
//! polynomial symbol. The ansatz y = sum of (alpha_k, beta_k) (x-a)^(sigma+k)
//! leads to a 2x2 step system whose determinant n^2 - (sigma+k)^2 vanishes
//! only at the resonance step k = 2n on the sigma = -n branch; solvability
//! there is exactly the meromorphy test.

use num::BigRational;
use num::ToPrimitive;
use thiserror::Error;

use crate::algebra::{GaussRat, SymPoly};
use crate::poles::{PoleData, PoleError};
use crate::series::Laurent;

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error("non-integer exponents: phi[-1]*psi[-1] = {product} is not the square of a positive integer")]
    NonIntegerExponents { product: String },
    #[error("sigma = {sigma} is not an indicial exponent here (expected {n} or -{n})")]
    BadSigma { sigma: i64, n: u32 },
    #[error("truncation K = {got} stops before the resonance step k = {resonance}")]
    TruncationTooSmall { got: u32, resonance: u32 },
    #[error("resonance obstruction at step k = {k} is nonzero: {obstruction}")]
    ResonanceObstruction { k: u32, obstruction: SymPoly },
    #[error("solution coefficients (alpha_0, beta_0) must not both vanish")]
    ZeroSolution,
    #[error(transparent)]
    Pole(#[from] PoleError),
}

/// The two indicial exponents (+n, -n) at the pole.
pub fn indicial_exponents(d: &PoleData) -> Result<(i64, i64), FrobeniusError> {
    let n = pole_order(d)?;
    Ok((n as i64, -(n as i64)))
}

fn pole_order(d: &PoleData) -> Result<u32, FrobeniusError> {
    let product = &d.phi_at(-1) * &d.psi_at(-1);
    product
        .perfect_square_root()
        .and_then(|r| r.to_u32())
        .filter(|&n| n >= 1)
        .ok_or(FrobeniusError::NonIntegerExponents {
            product: product.to_string(),
        })
}

/// One branch of the local solution, coefficients polynomial in z.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSolution {
    pub sigma: i64,
    /// alpha[k], beta[k] multiply (x-a)^(sigma+k).
    pub alpha: Vec<SymPoly>,
    pub beta: Vec<SymPoly>,
    /// How the free coefficient at the resonance step was fixed, when one
    /// was injected.
    pub resonance_free_choice: Option<String>,
}

/// Solve the step systems up to and including step K.
///
/// Away from the resonance the 2x2 system is inverted exactly; at the
/// resonance (sigma = -n, k = 2n) solvability requires the combination
/// `phi[-1] F1 - n F2` to vanish identically in z, and the free coefficient
/// is fixed by the deterministic choice alpha_2n = 0.
pub fn local_solution(
    d: &PoleData,
    sigma: i64,
    k_steps: u32,
) -> Result<FrobeniusSolution, FrobeniusError> {
    let n = pole_order(d)?;
    if sigma != n as i64 && sigma != -(n as i64) {
        return Err(FrobeniusError::BadSigma { sigma, n });
    }
    if sigma < 0 && k_steps < 2 * n {
        return Err(FrobeniusError::TruncationTooSmall {
            got: k_steps,
            resonance: 2 * n,
        });
    }
    if d.depth() < k_steps as i64 - 1 {
        return Err(PoleError::Depth {
            needed: k_steps as i64 - 1,
            have: d.depth(),
        }
        .into());
    }

    let z = SymPoly::symbol("z");
    let minus_iz = z.scale(&GaussRat::ratio_i(-1, 1));
    let phi_m1 = d.phi_at(-1);
    let psi_m1 = d.psi_at(-1);
    let n_sq = (n as i64) * (n as i64);

    let mut alpha = vec![SymPoly::constant(psi_m1.clone())];
    let mut beta = vec![SymPoly::constant(GaussRat::from_int(sigma))];
    let mut resonance_free_choice = None;

    for k in 1..=k_steps {
        let mut f1 = minus_iz.mul(&alpha[(k - 1) as usize]);
        let mut f2 = minus_iz.mul(&beta[(k - 1) as usize]);
        for m in 0..k {
            let j = (k - 1 - m) as usize;
            f1 = f1.add(&beta[j].scale(&d.psi_at(m as i64)));
            f2 = f2.sub(&alpha[j].scale(&d.phi_at(m as i64)));
        }
        let s = sigma + k as i64;
        let det = n_sq - s * s;
        if det != 0 {
            let inv = BigRational::new(1.into(), det.into());
            let a = f1
                .scale(&GaussRat::from_int(-s))
                .add(&f2.scale(&psi_m1))
                .scale_rat(&inv);
            let b = f1
                .scale(&-&phi_m1)
                .add(&f2.scale(&GaussRat::from_int(s)))
                .scale_rat(&inv);
            alpha.push(a);
            beta.push(b);
        } else {
            // k = 2n on the sigma = -n branch
            let obstruction = f1.scale(&phi_m1).sub(&f2.scale(&GaussRat::from_int(s)));
            if !obstruction.is_zero() {
                return Err(FrobeniusError::ResonanceObstruction { k, obstruction });
            }
            let inv_psi = GaussRat::one()
                .checked_div(&psi_m1)
                .expect("residue coefficient is nonzero");
            alpha.push(SymPoly::zero());
            beta.push(f1.neg().scale(&inv_psi));
            resonance_free_choice = Some(format!(
                "resonance at k = {k}: set alpha[{k}] = 0, beta[{k}] = -F1/psi[-1]"
            ));
        }
    }
    Ok(FrobeniusSolution {
        sigma,
        alpha,
        beta,
        resonance_free_choice,
    })
}

/// Outcome of running both exponent branches with symbolic z.
#[derive(Debug, Clone, PartialEq)]
pub struct MeromorphyVerdict {
    pub meromorphic: bool,
    /// Resonance combination as a polynomial in z; when the exponents are
    /// integers, `meromorphic` is exactly "this polynomial is zero".
    pub obstruction: SymPoly,
    pub n: Option<u32>,
    pub reason: Option<String>,
}

/// Both local solutions exist with meromorphic (pole-only) behavior iff the
/// sigma = -n branch clears its resonance; the sigma = +n branch never
/// resonates. Non-integer exponents mean branch-point behavior and a false
/// verdict with its own reason.
pub fn meromorphy_verdict(d: &PoleData, k_steps: u32) -> Result<MeromorphyVerdict, FrobeniusError> {
    let n = match pole_order(d) {
        Ok(n) => n,
        Err(FrobeniusError::NonIntegerExponents { product }) => {
            return Ok(MeromorphyVerdict {
                meromorphic: false,
                obstruction: SymPoly::zero(),
                n: None,
                reason: Some(format!(
                    "indicial exponents are not integers (phi[-1]*psi[-1] = {product})"
                )),
            })
        }
        Err(e) => return Err(e),
    };
    let steps = k_steps.max(2 * n);
    local_solution(d, n as i64, steps)?;
    match local_solution(d, -(n as i64), steps) {
        Ok(_) => Ok(MeromorphyVerdict {
            meromorphic: true,
            obstruction: SymPoly::zero(),
            n: Some(n),
            reason: None,
        }),
        Err(FrobeniusError::ResonanceObstruction { k, obstruction }) => Ok(MeromorphyVerdict {
            meromorphic: false,
            obstruction,
            n: Some(n),
            reason: Some(format!("resonance at step k = {k} is obstructed")),
        }),
        Err(e) => Err(e),
    }
}

/// Result of substituting a solution back into the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResidualVerdict {
    Clean,
    FirstNonzeroAt(i64),
}

/// Substitute the series solution into both equations and look for any
/// nonzero coefficient within the computable range.
pub fn residual_check(
    d: &PoleData,
    sol: &FrobeniusSolution,
    k_order: i64,
) -> Result<ResidualVerdict, FrobeniusError> {
    if sol.alpha.first().is_none_or(|a| a.is_zero())
        && sol.beta.first().is_none_or(|b| b.is_zero())
    {
        return Err(FrobeniusError::ZeroSolution);
    }
    let (p, q) = d.to_series();
    let p = p.to_sympoly();
    let q = q.to_sympoly();
    let mut y1 = Laurent::zero_to(sol.sigma + sol.alpha.len() as i64 - 1);
    let mut y2 = Laurent::zero_to(sol.sigma + sol.beta.len() as i64 - 1);
    for (k, a) in sol.alpha.iter().enumerate() {
        y1.insert(sol.sigma + k as i64, a.clone());
    }
    for (k, b) in sol.beta.iter().enumerate() {
        y2.insert(sol.sigma + k as i64, b.clone());
    }
    let i_pos = SymPoly::constant(GaussRat::i());
    let z = SymPoly::symbol("z");
    let r1 = y1
        .derive()
        .scale(&i_pos)
        .sub(&q.mul(&y2).scale(&i_pos))
        .sub(&y1.scale(&z));
    let r2 = y2
        .derive()
        .scale(&i_pos)
        .neg()
        .add(&p.mul(&y1).scale(&i_pos))
        .sub(&y2.scale(&z));
    let mut first = None;
    for r in [&r1, &r2] {
        if let Some((k, _)) = r.truncate(k_order).iter().next() {
            first = Some(first.map_or(k, |f: i64| f.min(k)));
        }
    }
    Ok(match first {
        None => ResidualVerdict::Clean,
        Some(k) => ResidualVerdict::FirstNonzeroAt(k),
    })
}
