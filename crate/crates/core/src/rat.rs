//! Exact rationals.
//!
//! `Rat` is an arbitrary-precision rational in lowest terms with a positive
//! denominator. Ranks of exceptional bundles grow doubly exponentially with
//! the tree depth, so fixed-width integers overflow long before depth 8.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a plain decimal such as `-0.125`.
///
/// Decimals are read exactly as `p / 10^k`.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    let bad = || Error::Parse(text.to_string());
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !digits.chars().all(|c| c.is_ascii_digit())
            || (digits.is_empty() && frac.is_empty())
        {
            return Err(bad());
        }
        let joined = format!("{digits}{frac}");
        let mantissa: BigInt = if joined.is_empty() {
            BigInt::zero()
        } else {
            joined.parse().map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rat::new(mantissa, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Parses a comma-separated list of rationals.
pub fn parse_rat_list(text: &str) -> Result<Vec<Rat>> {
    text.split(',').map(parse_rat).collect()
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to scaling when the crate conversion refuses.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Best rational equal to `x` exactly (binary64 values are dyadic rationals).
pub fn from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Exact square root when `x` is the square of a rational.
pub fn sqrt_exact(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rat::new(rn, rd))
    } else {
        None
    }
}

pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn is_half_integer(x: &Rat) -> bool {
    (x * int(2)).is_integer()
}

pub fn half() -> Rat {
    rat(1, 2)
}

pub fn one() -> Rat {
    Rat::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(parse_rat("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("0.01").unwrap(), rat(1, 100));
        assert_eq!(parse_rat("-0.9").unwrap(), rat(-9, 10));
        assert_eq!(parse_rat("-.5").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("3").unwrap(), int(3));
        assert_eq!(parse_rat("6/4").unwrap(), rat(3, 2));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
        assert!(parse_rat("1.2.3").is_err());
    }

    #[test]
    fn display_matches_wire_format() {
        assert_eq!(rat(-1, 2).to_string(), "-1/2");
        assert_eq!(int(2).to_string(), "2");
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(sqrt_exact(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(sqrt_exact(&rat(2, 1)), None);
        assert_eq!(sqrt_exact(&rat(-1, 1)), None);
    }
}
