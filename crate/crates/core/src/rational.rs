//! Exact rational scalars and their string forms.
//!
//! All coefficients, states and values in this crate are `BigRational`.
//! Strings are either `"num/den"` or decimal (`"0.25"`, `"-3"`, `"1e-6"`),
//! converted exactly; no binary floating point anywhere.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal `{literal}`: {reason}")]
pub struct ParseRatError {
    pub literal: String,
    pub reason: String,
}

/// Shorthand for `n/d` used throughout the tests.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `r^k` for a non-negative integer exponent.
pub fn pow_u(r: &Rat, k: usize) -> Rat {
    let mut acc = Rat::one();
    let mut base = r.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Canonical string form: integers without a denominator, otherwise `num/den`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `num/den`, plain integers, decimals and decimals with an exponent.
pub fn parse_rat(s: &str) -> Result<Rat, ParseRatError> {
    let err = |reason: &str| ParseRatError {
        literal: s.to_string(),
        reason: reason.to_string(),
    };
    let s = s.trim();
    if s.is_empty() {
        return Err(err("empty string"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let numer: BigInt = n.trim().parse().map_err(|_| err("bad numerator"))?;
        let denom: BigInt = d.trim().parse().map_err(|_| err("bad denominator"))?;
        if denom.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(Rat::new(numer, denom));
    }
    // Decimal form: [sign] digits [. digits] [e|E [sign] digits]
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| err("bad exponent"))?;
            (&s[..i], e)
        }
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    let digits: String = format!(
        "{}{}",
        if int_part.is_empty() { "0" } else { int_part },
        frac_part
    );
    let numer: BigInt = digits.parse().map_err(|_| err("bad mantissa"))?;
    let ten = BigInt::from(10);
    let scale = exp - frac_part.len() as i64;
    let value = if scale >= 0 {
        Rat::from_integer(numer * num::pow::pow(ten, scale as usize))
    } else {
        Rat::new(numer, num::pow::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

/// Sign of a rational as -1, 0, or 1.
pub fn sign(r: &Rat) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}
