//! Exact rational scalars: parsing, formatting and conversion helpers.
//!
//! All mask coefficients, parameter values and data values in this crate are
//! arbitrary-precision rationals ([`Q`]); floating point only enters when a
//! quantity is handed to the numerical layers (eigenvalues, norms, reports).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used for coefficients, parameters and data values.
pub type Q = BigRational;

/// Shorthand for `n/d` (panics on `d == 0`; intended for literals).
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for the integer `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from(BigInt::from(n))
}

/// Convert to `f64`, rounding to the nearest representable value.
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Embed an `f64` exactly (every finite float is a dyadic rational).
pub fn from_f64(x: f64) -> Result<Q> {
    Q::from_float(x).ok_or_else(|| Error::ParseRational {
        text: format!("{x}"),
    })
}

/// Parse `"p/q"`, integer, or decimal (`"-3/64"`, `"7"`, `"0.25"`) literals.
pub fn parse_rational(text: &str) -> Result<Q> {
    let s = text.trim();
    let err = || Error::ParseRational {
        text: text.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        // Decimal notation: digits after the point scale the denominator.
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            BigInt::zero()
        } else {
            int_part.parse().map_err(|_| err())?
        };
        let frac_digits: BigInt = frac_part.parse().map_err(|_| err())?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let magnitude = int_digits.abs() * &scale + frac_digits;
        let signed = if negative { -magnitude } else { magnitude };
        return Ok(Q::new(signed, scale));
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Q::from(n))
}

/// Format as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(x: &Q) -> String {
    x.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-3/64").unwrap(), q(-3, 64));
        assert_eq!(parse_rational(" 7 ").unwrap(), qi(7));
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), q(-3, 2));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-0.0625").unwrap(), q(-1, 16));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1/0", "1//2", "1.2.3", "0x10", "1e-3"] {
            assert!(parse_rational(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn formats_reduced_fractions() {
        assert_eq!(format_rational(&q(2, 4)), "1/2");
        assert_eq!(format_rational(&qi(-3)), "-3");
        assert_eq!(format_rational(&q(-3, 2)), "-3/2");
    }

    #[test]
    fn float_round_trip_is_exact() {
        for x in [0.0, 1.0, -0.375, 0.1, 1.0 / 3.0, 6.1e-12] {
            assert_eq!(to_f64(&from_f64(x).unwrap()), x);
        }
    }
}
