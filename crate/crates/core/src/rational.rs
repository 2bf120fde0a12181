//! Exact rationals and their `"p/q"` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used everywhere in the crate.
pub type Q = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalError {
    #[error("decimal \"{given}\" is not accepted; write it as \"{suggestion}\"")]
    Decimal { given: String, suggestion: String },
    #[error("\"{0}\" has a zero denominator")]
    ZeroDenominator(String),
    #[error("\"{0}\" is not a rational of the form \"p/q\"")]
    Malformed(String),
}

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Formats as `"p/q"` in lowest terms; integers keep the `/1`.
pub fn fmt_q(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`. Decimal notation is rejected with
/// the exact fraction it denotes as a suggestion.
pub fn parse_q(text: &str) -> Result<Q, RationalError> {
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_int(num).ok_or_else(|| RationalError::Malformed(text.to_string()))?;
        let d = parse_int(den).ok_or_else(|| RationalError::Malformed(text.to_string()))?;
        if d.is_zero() {
            return Err(RationalError::ZeroDenominator(text.to_string()));
        }
        return Ok(Q::new(n, d));
    }
    if let Some(n) = parse_int(s) {
        return Ok(Q::from_integer(n));
    }
    match decimal_value(s) {
        Some(v) => Err(RationalError::Decimal {
            given: text.to_string(),
            suggestion: fmt_q(&v),
        }),
        None => Err(RationalError::Malformed(text.to_string())),
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn decimal_value(s: &str) -> Option<Q> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.')?;
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}0").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len() + 1);
    let v = Q::new(digits, scale);
    Some(if neg { -v } else { v })
}

pub fn max_q<'a>(items: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    items.into_iter().max().cloned()
}

pub fn min_q<'a>(items: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    items.into_iter().min().cloned()
}

/// `base^exp` for a possibly negative exponent; `base` must be nonzero when
/// `exp < 0`.
pub fn powi(base: &Q, exp: i64) -> Q {
    let mut acc = Q::one();
    let b = if exp < 0 { base.recip() } else { base.clone() };
    for _ in 0..exp.unsigned_abs() {
        acc *= &b;
    }
    acc
}

pub fn is_positive(v: &Q) -> bool {
    v.is_positive()
}
