//! Parser for the canonical printed form of [`DiffPoly`] (and the symbol
//! polynomials inside its coefficients), so that print -> parse is the
//! identity.
//!
//! Grammar sketch, where `+`/`-` separate terms at the top level only:
//!
//! ```text
//! diffpoly := term ((" + " | " - ") term)*
//! term     := piece (" * " piece)*
//! piece    := "p" | "q" with optional "^(j)" and "^e"   (monomial factor)
//!           | rational | "i" | ident ("^" e)?           (coefficient factor)
//!           | "(" sympoly ")"                           (multi-term coefficient)
//! ```

use std::str::FromStr;

use thiserror::Error;

use super::diffpoly::{DiffMono, DiffPoly};
use super::gaussrat::GaussRat;
use super::sympoly::SymPoly;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse differential polynomial at {at:?}: {reason}")]
pub struct ParseDiffPolyError {
    pub at: String,
    pub reason: String,
}

fn err(at: &str, reason: impl Into<String>) -> ParseDiffPolyError {
    ParseDiffPolyError {
        at: at.chars().take(40).collect(),
        reason: reason.into(),
    }
}

/// Split on a separator that must occur at depth zero w.r.t. parentheses.
fn split_top<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            _ => {
                if depth == 0 && s[i..].starts_with(sep) {
                    out.push(&s[start..i]);
                    start = i + sep.len();
                    i += sep.len();
                    continue;
                }
            }
        }
        i += 1;
    }
    out.push(&s[start..]);
    out
}

/// Signed top-level terms: `"a - b + c"` -> `[(+, a), (-, b), (+, c)]`.
fn signed_terms(s: &str) -> Result<Vec<(bool, &str)>, ParseDiffPolyError> {
    let mut out = Vec::new();
    let mut rest = s.trim();
    let mut negative = false;
    if let Some(r) = rest.strip_prefix('-') {
        negative = true;
        rest = r.trim_start();
    }
    loop {
        // find the next top-level " + " or " - "
        let mut depth = 0usize;
        let mut cut = None;
        let bytes = rest.as_bytes();
        for i in 0..bytes.len() {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth = depth.saturating_sub(1),
                b' ' if depth == 0 => {
                    if rest[i..].starts_with(" + ") {
                        cut = Some((i, false));
                        break;
                    }
                    if rest[i..].starts_with(" - ") {
                        cut = Some((i, true));
                        break;
                    }
                }
                _ => {}
            }
        }
        match cut {
            Some((i, next_neg)) => {
                out.push((negative, rest[..i].trim()));
                negative = next_neg;
                rest = rest[i + 3..].trim_start();
            }
            None => {
                out.push((negative, rest.trim()));
                return Ok(out);
            }
        }
    }
}

/// A `p`/`q` factor like `q`, `p^(1)`, `q^(2)^3`. Returns (is_q, order, exp).
fn parse_mono_factor(s: &str) -> Option<(bool, u32, u32)> {
    let mut rest = s;
    let is_q = match rest.as_bytes().first() {
        Some(b'p') => false,
        Some(b'q') => true,
        _ => return None,
    };
    rest = &rest[1..];
    let mut order = 0u32;
    if let Some(r) = rest.strip_prefix("^(") {
        let close = r.find(')')?;
        order = r[..close].parse().ok()?;
        rest = &r[close + 1..];
    }
    let mut exp = 1u32;
    if let Some(r) = rest.strip_prefix('^') {
        exp = r.parse().ok()?;
        rest = "";
        if exp == 0 {
            return None;
        }
        let _ = r;
    } else if !rest.is_empty() {
        return None;
    }
    let _ = rest;
    Some((is_q, order, exp))
}

/// Coefficient factor: number, `i`, symbol with optional power, or a
/// parenthesized polynomial.
fn parse_coeff_factor(s: &str) -> Result<SymPoly, ParseDiffPolyError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(err(s, "empty factor"));
    }
    if let Some(inner) = t.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| err(s, "unbalanced parenthesis"))?;
        return parse_sympoly(inner);
    }
    if t == "i" {
        return Ok(SymPoly::constant(GaussRat::i()));
    }
    let first = t.as_bytes()[0];
    if first.is_ascii_digit() || first == b'-' || first == b'+' {
        let g: GaussRat = t.parse().map_err(|e| err(s, format!("{e}")))?;
        return Ok(SymPoly::constant(g));
    }
    // symbol, optionally powered
    let (name, exp) = match t.split_once('^') {
        Some((n, e)) => {
            let exp: u32 = e.parse().map_err(|_| err(s, "bad exponent"))?;
            (n, exp)
        }
        None => (t, 1),
    };
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
        || name.as_bytes()[0].is_ascii_digit()
    {
        return Err(err(s, "not a symbol"));
    }
    let base = SymPoly::symbol(name);
    let mut out = SymPoly::one();
    for _ in 0..exp {
        out = out.mul(&base);
    }
    Ok(out)
}

/// Polynomial in constant symbols (used inside parenthesized coefficients).
pub fn parse_sympoly(s: &str) -> Result<SymPoly, ParseDiffPolyError> {
    let mut out = SymPoly::zero();
    for (neg, term) in signed_terms(s)? {
        if term.is_empty() {
            return Err(err(s, "empty term"));
        }
        // a full Gaussian literal like -1-i contains '-' and '*' characters
        // that are not term structure; try it whole (sign reattached) first
        let signed = if neg {
            format!("-{term}")
        } else {
            term.to_string()
        };
        if let Ok(g) = signed.parse::<GaussRat>() {
            out = out.add(&SymPoly::constant(g));
            continue;
        }
        let mut value = SymPoly::one();
        for piece in split_top(term, "*") {
            let piece = piece.trim();
            value = value.mul(&parse_coeff_factor(piece)?);
        }
        if neg {
            value = value.neg();
        }
        out = out.add(&value);
    }
    Ok(out)
}

pub fn parse_diffpoly(s: &str) -> Result<DiffPoly, ParseDiffPolyError> {
    let trimmed = s.trim();
    if trimmed.is_empty() {
        return Err(err(s, "empty input"));
    }
    let mut out = DiffPoly::zero();
    for (neg, term) in signed_terms(trimmed)? {
        if term.is_empty() {
            return Err(err(s, "empty term"));
        }
        let mut coeff = SymPoly::one();
        let mut mono = DiffMono::one();
        let mut seen_mono = false;
        for piece in split_top(term, " * ") {
            let piece = piece.trim();
            if let Some((is_q, order, exp)) = parse_mono_factor(piece) {
                seen_mono = true;
                let factor = if is_q {
                    DiffMono::var_q(order)
                } else {
                    DiffMono::var_p(order)
                };
                for _ in 0..exp {
                    mono = mono.mul(&factor);
                }
            } else {
                if seen_mono {
                    return Err(err(piece, "coefficient after monomial factors"));
                }
                if let Ok(g) = piece.parse::<GaussRat>() {
                    coeff = coeff.mul(&SymPoly::constant(g));
                    continue;
                }
                // tight products like 1/2*C1 live inside one piece
                for sub in split_top(piece, "*") {
                    coeff = coeff.mul(&parse_coeff_factor(sub.trim())?);
                }
            }
        }
        if neg {
            coeff = coeff.neg();
        }
        out = out.add(&DiffPoly::from_mono(mono).scale_sym(&coeff));
    }
    Ok(out)
}

impl FromStr for DiffPoly {
    type Err = ParseDiffPolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_diffpoly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_simple() {
        for text in [
            "0",
            "q",
            "-q",
            "1/4*i * q^(2) - 1/2*i * p * q^2",
            "(3 + C1) * q + i*C2 * p^(1)^2",
            "p * q",
        ] {
            let f: DiffPoly = text.parse().unwrap();
            assert_eq!(f.to_string(), text, "canonical reprint");
        }
    }

    #[test]
    fn parse_is_inverse_of_display() {
        let f = DiffPoly::qd(2)
            .scale(&GaussRat::ratio_i(1, 4))
            .add(&DiffPoly::q().scale_sym(&SymPoly::symbol("C2").scale(&GaussRat::ratio_i(-1, 1))))
            .add(&DiffPoly::qd(1).scale_sym(&SymPoly::symbol("C1").scale(&GaussRat::ratio(1, 2))));
        let text = f.to_string();
        let back: DiffPoly = text.parse().unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn bad_inputs() {
        for text in ["", "p *", "q^(x)", "C1 C2", "1 +", "p * C1"] {
            assert!(text.parse::<DiffPoly>().is_err(), "{text:?}");
        }
    }
}
