//! Exact rationals: parsing and the `p/q` text form.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// `p/q` with `q >= 1`, also for integers (`2/1`).
pub fn format_ratio(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p/q`, integers and plain decimals such as `0.01` or `-1.5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Domain(format!("not a rational number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        return Ok(Rational::new(p, q));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let numer: BigInt = digits.parse().map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

/// Smallest `i >= 0` with `2^i >= x`, for positive `x`.
pub(crate) fn ceil_log2(x: &Rational) -> u64 {
    assert!(x.is_positive());
    let mut i = 0u64;
    let mut p = Rational::one();
    // Jump close first: bit lengths differ from log2 by at most one.
    let approx = x.numer().bits() as i64 - x.denom().bits() as i64 - 1;
    if approx > 0 {
        i = approx as u64;
        p = Rational::from_integer(BigInt::one() << i);
    }
    while &p < x {
        p *= BigInt::from(2);
        i += 1;
    }
    i
}
