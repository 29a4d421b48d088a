//! Exact rational scalars and their text forms.

use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse `{0}` as a rational number")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `3`, `-3/2` or a finite decimal such as `0.905`.
pub fn parse(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let mag = BigInt::from_str(&digits).map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let value = Rational::new(mag, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| err())
}

/// `3/2`, `1`, `-7/4`.
pub fn render(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Fixed-point rendering rounded half away from zero.
pub fn render_decimal(value: &Rational, places: usize) -> String {
    let scale = Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let scaled = value.abs() * scale;
    let half = ratio(1, 2);
    let rounded = (scaled + half).floor().to_integer();
    let digits = rounded.to_string();
    let sign = if value.is_negative() && !rounded.is_zero() {
        "-"
    } else {
        ""
    };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{:0>width$}", digits, width = places + 1);
    let (whole, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{whole}.{frac}")
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Largest multiple of `2^-bits` not exceeding `value`.
pub fn floor_to_dyadic(value: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = value * Rational::from_integer(scale.clone());
    Rational::new(scaled.floor().to_integer(), scale)
}

pub fn is_dyadic(value: &Rational) -> bool {
    let d = value.denom();
    // power of two iff d & (d - 1) == 0
    let dm1: BigInt = d - BigInt::one();
    (d & dm1).is_zero()
}

/// Least common multiple of the denominators.
pub fn lcm_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse("0.905").unwrap(), ratio(181, 200));
        assert_eq!(parse("-0.25").unwrap(), ratio(-1, 4));
        assert_eq!(parse(" 4 ").unwrap(), int(4));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
        assert!(parse("1.").is_err());
    }

    #[test]
    fn renders_round_half_up() {
        assert_eq!(render_decimal(&ratio(5, 2), 4), "2.5000");
        assert_eq!(render_decimal(&ratio(1, 20000), 4), "0.0001");
        assert_eq!(render_decimal(&ratio(-3, 2), 1), "-1.5");
        assert_eq!(render_decimal(&ratio(2, 3), 0), "1");
        assert_eq!(render(&ratio(6, 4)), "3/2");
        assert_eq!(render(&int(2)), "2");
    }

    #[test]
    fn dyadic_floor() {
        let third = ratio(1, 3);
        let f = floor_to_dyadic(&third, 4);
        assert_eq!(f, ratio(5, 16));
        assert!(is_dyadic(&f));
        assert!(!is_dyadic(&third));
    }
}
