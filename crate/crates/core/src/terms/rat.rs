//! Exact rational helpers on top of [`num::BigRational`].
//!
//! `BigRational` keeps its values reduced (gcd of numerator and denominator is
//! one, denominator positive), which is exactly the canonical form the rest of
//! the crate relies on for structural equality.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact arbitrary-precision rational.
pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n / d` in canonical form. Panics on a zero denominator.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an SMT-LIB numeral (`42`) or decimal (`3.125`) exactly.
pub fn parse_decimal(text: &str) -> Option<Rat> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{whole}{frac}").parse().ok()?;
    let denom = num::pow(BigInt::from(10), frac.len());
    Some(Rat::new(digits, denom))
}

/// SMT-LIB rendering: `3`, `(- 3)`, `(/ 3 2)`, `(- (/ 3 2))`.
pub fn to_smtlib(r: &Rat) -> String {
    let mag = r.abs();
    let body = if mag.is_integer() {
        mag.numer().to_string()
    } else {
        format!("(/ {} {})", mag.numer(), mag.denom())
    };
    if r.is_negative() {
        format!("(- {body})")
    } else {
        body
    }
}

/// Compact human rendering used in traces and logs: `3`, `-3`, `3/2`.
pub fn to_plain(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when the numerator or the denominator exceeds `threshold` in
/// absolute value.
pub fn is_oversized(r: &Rat, threshold: &BigInt) -> bool {
    r.numer().abs() > *threshold || r.denom() > threshold
}

pub fn floor(r: &Rat) -> Rat {
    r.floor()
}

pub fn ceil(r: &Rat) -> Rat {
    r.ceil()
}

pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

pub fn sign(r: &Rat) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    }
}
