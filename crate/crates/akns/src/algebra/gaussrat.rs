use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

/// Gaussian rational: `re + im*i` with arbitrary-precision rational parts.
///
/// This is the coefficient field everything else is built on. `BigRational`
/// keeps itself reduced with a positive denominator, so values are always
/// canonical and `==` is semantic equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRat {
    re: BigRational,
    im: BigRational,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaussRatError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {input:?} as a Gaussian rational: {reason}")]
    Parse { input: String, reason: String },
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `num/den` as a real value. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    /// `num/den * i`. Panics if `den == 0`.
    pub fn ratio_i(num: i64, den: i64) -> Self {
        GaussRat::new(
            BigRational::zero(),
            BigRational::new(num.into(), den.into()),
        )
    }

    pub fn zero() -> Self {
        GaussRat::from_int(0)
    }

    pub fn one() -> Self {
        GaussRat::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussRat::new(BigRational::zero(), BigRational::one())
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRat::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2 = z * conj(z)`, always a nonnegative rational.
    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_div(&self, rhs: &GaussRat) -> Result<GaussRat, GaussRatError> {
        let n = rhs.norm_sq();
        if n.is_zero() {
            return Err(GaussRatError::DivisionByZero);
        }
        let re = (&self.re * &rhs.re + &self.im * &rhs.im) / &n;
        let im = (&self.im * &rhs.re - &self.re * &rhs.im) / &n;
        Ok(GaussRat::new(re, im))
    }

    pub fn inv(&self) -> Result<GaussRat, GaussRatError> {
        GaussRat::one().checked_div(self)
    }

    /// Scale by a plain rational.
    pub fn scale(&self, r: &BigRational) -> GaussRat {
        GaussRat::new(&self.re * r, &self.im * r)
    }

    /// If `self` is a nonnegative rational integer `n*n`, return `n`.
    pub fn perfect_square_root(&self) -> Option<BigInt> {
        if !self.is_real() || self.re.is_negative() {
            return None;
        }
        if !self.re.denom().is_one() {
            return None;
        }
        let numer = self.re.numer();
        let root = numer.sqrt();
        if &(&root * &root) == numer {
            Some(root)
        } else {
            None
        }
    }

    /// Exact square root over the Gaussian rationals, if one exists.
    ///
    /// Returns the root with `re > 0`, or `re == 0 && im >= 0`; the other
    /// root is its negation. Used by the quadratic fallback of the constant
    /// solver; the criterion is that both `|z|` and `(re + |z|)/2` are
    /// rational squares.
    pub fn sqrt(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(GaussRat::zero());
        }
        if self.im.is_zero() {
            return if self.re.is_negative() {
                rat_sqrt(&-self.re.clone()).map(|y| GaussRat::new(BigRational::zero(), y))
            } else {
                rat_sqrt(&self.re).map(|x| GaussRat::new(x, BigRational::zero()))
            };
        }
        let r = rat_sqrt(&self.norm_sq())?;
        let half = BigRational::new(1.into(), 2.into());
        let xsq = (&self.re + &r) * &half;
        let x = rat_sqrt(&xsq)?;
        if x.is_zero() {
            return None;
        }
        let y = &self.im / (&x * BigRational::from_integer(2.into()));
        let root = GaussRat::new(x, y);
        debug_assert_eq!(&root * &root, *self);
        Some(root)
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let ns = r.numer().sqrt();
    let ds = r.denom().sqrt();
    if &(&ns * &ns) == r.numer() && &(&ds * &ds) == r.denom() {
        Some(BigRational::new(ns, ds))
    } else {
        None
    }
}

impl fmt::Debug for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GaussRat({self})")
    }
}

impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        -&self
    }
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, rhs: &GaussRat) -> GaussRat {
        GaussRat::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

/// Panics on division by zero; use [`GaussRat::checked_div`] when the
/// divisor is not known to be nonzero.
impl Div for &GaussRat {
    type Output = GaussRat;
    fn div(self, rhs: &GaussRat) -> GaussRat {
        self.checked_div(rhs).expect("GaussRat division by zero")
    }
}

macro_rules! forward_owned_binop {
    ($($trait:ident, $method:ident);*) => {$(
        impl $trait for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: GaussRat) -> GaussRat {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&GaussRat> for GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: &GaussRat) -> GaussRat {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<GaussRat> for &GaussRat {
            type Output = GaussRat;
            fn $method(self, rhs: GaussRat) -> GaussRat {
                $trait::$method(self, &rhs)
            }
        }
    )*};
}

forward_owned_binop!(Add, add; Sub, sub; Mul, mul; Div, div);

/// Canonical text form: `"a/b"`, `"c/d*i"`, `"a/b+c/d*i"`, `"a/b-c/d*i"`,
/// with `/1` suppressed and bare `i` for a unit imaginary coefficient.
impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn imag(part: &BigRational) -> String {
            if part.is_one() {
                "i".to_string()
            } else if (-part).is_one() {
                "-i".to_string()
            } else {
                format!("{part}*i")
            }
        }
        if self.im.is_zero() {
            return write!(f, "{}", self.re);
        }
        if self.re.is_zero() {
            return write!(f, "{}", imag(&self.im));
        }
        if self.im.is_negative() {
            let pos = -self.im.clone();
            let tail = imag(&pos);
            write!(f, "{}-{}", self.re, tail)
        } else {
            write!(f, "{}+{}", self.re, imag(&self.im))
        }
    }
}

impl FromStr for GaussRat {
    type Err = GaussRatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let input = s.trim();
        let fail = |reason: &str| GaussRatError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if input.is_empty() {
            return Err(fail("empty string"));
        }
        // split into at most two signed parts at the top level
        let bytes = input.as_bytes();
        let mut split = None;
        for (idx, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[idx - 1] != b'/' && bytes[idx - 1] != b'*' {
                // a sign following a digit or 'i' separates the two parts
                if bytes[idx - 1].is_ascii_digit() || bytes[idx - 1] == b'i' {
                    split = Some(idx);
                    break;
                }
                return Err(fail("misplaced sign"));
            }
        }
        let (first, second) = match split {
            Some(idx) => (&input[..idx], Some(&input[idx..])),
            None => (input, None),
        };
        let mut re: Option<BigRational> = None;
        let mut im: Option<BigRational> = None;
        for part in std::iter::once(first).chain(second) {
            let (value, is_imag) = parse_part(part).map_err(|r| fail(&r))?;
            let slot = if is_imag { &mut im } else { &mut re };
            if slot.is_some() {
                return Err(fail("duplicate real or imaginary part"));
            }
            *slot = Some(value);
        }
        Ok(GaussRat::new(
            re.unwrap_or_else(BigRational::zero),
            im.unwrap_or_else(BigRational::zero),
        ))
    }
}

/// One signed part: `-3/4`, `+i`, `2*i`, `-1/6*i`. Returns (value, is_imaginary).
fn parse_part(part: &str) -> Result<(BigRational, bool), String> {
    let (sign, rest) = match part.strip_prefix('-') {
        Some(r) => (-1, r),
        None => (1, part.strip_prefix('+').unwrap_or(part)),
    };
    if rest.is_empty() {
        return Err("missing value after sign".into());
    }
    let (body, is_imag) = if rest == "i" {
        return Ok((
            BigRational::from_integer(sign.into()),
            true,
        ));
    } else if let Some(b) = rest.strip_suffix("*i") {
        (b, true)
    } else {
        (rest, false)
    };
    if body.is_empty() || body.contains('i') {
        return Err(format!("malformed component {part:?}"));
    }
    let value = match body.split_once('/') {
        Some((n, d)) => {
            let numer: BigInt = n.parse().map_err(|_| format!("bad numerator {n:?}"))?;
            let denom: BigInt = d.parse().map_err(|_| format!("bad denominator {d:?}"))?;
            if denom.is_zero() {
                return Err("zero denominator".into());
            }
            BigRational::new(numer, denom)
        }
        None => {
            let numer: BigInt = body.parse().map_err(|_| format!("bad integer {body:?}"))?;
            BigRational::from_integer(numer)
        }
    };
    Ok((value * BigRational::from_integer(sign.into()), is_imag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_product() {
        let a = GaussRat::new(
            BigRational::from_integer(1.into()),
            BigRational::from_integer(1.into()),
        );
        assert_eq!(&a * &a.conj(), GaussRat::from_int(2));
    }

    #[test]
    fn half_i_twice() {
        let h = GaussRat::ratio_i(1, 2);
        assert_eq!(&h + &h, GaussRat::i());
    }

    #[test]
    fn division_checks_back() {
        let a = GaussRat::new(BigRational::new(3.into(), 4.into()), BigRational::new(1.into(), 2.into()));
        let b = GaussRat::ratio(1, 2);
        let q = a.checked_div(&b).unwrap();
        assert_eq!(q, GaussRat::new(BigRational::new(3.into(), 2.into()), BigRational::one()));
        assert_eq!(&q * &b, a);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            GaussRat::one().checked_div(&GaussRat::zero()),
            Err(GaussRatError::DivisionByZero)
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussRat::zero().to_string(), "0");
        assert_eq!(GaussRat::ratio(-1, 4).to_string(), "-1/4");
        assert_eq!(GaussRat::i().to_string(), "i");
        assert_eq!((-GaussRat::i()).to_string(), "-i");
        assert_eq!(GaussRat::ratio_i(7, 360).to_string(), "7/360*i");
        let mixed = GaussRat::new(BigRational::new(1.into(), 2.into()), BigRational::new((-1).into(), 3.into()));
        assert_eq!(mixed.to_string(), "1/2-1/3*i");
    }

    #[test]
    fn parse_inverse_of_display() {
        for s in ["0", "-2", "5/3", "i", "-i", "1/6*i", "-7/360*i", "1/2+1/3*i", "1/2-i", "-3+2*i"] {
            let v: GaussRat = s.parse().unwrap();
            assert_eq!(v.to_string(), s, "canonical reprint of {s}");
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1//2", "i*i", "1+2", "--3", "1/0", "2*j", "1+i+1"] {
            assert!(s.parse::<GaussRat>().is_err(), "{s:?} should fail");
        }
    }

    #[test]
    fn square_roots() {
        assert_eq!(GaussRat::from_int(9).perfect_square_root(), Some(3.into()));
        assert_eq!(GaussRat::from_int(8).perfect_square_root(), None);
        assert_eq!(GaussRat::ratio(9, 4).perfect_square_root(), None);
        let z = GaussRat::new(BigRational::zero(), BigRational::from_integer(2.into()));
        let r = z.sqrt().unwrap(); // sqrt(2i) = 1 + i
        assert_eq!(r, GaussRat::new(BigRational::one(), BigRational::one()));
        assert_eq!(GaussRat::from_int(-4).sqrt(), Some(GaussRat::ratio_i(2, 1)));
        assert_eq!(GaussRat::from_int(2).sqrt(), None);
    }
}
