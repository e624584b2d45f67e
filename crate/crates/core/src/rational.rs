//! Exact rational arithmetic helpers.
//!
//! The oracle layer computes probabilities in `BigRational` whenever the
//! inputs are rational, so that "exact" assertions mean exact equality and
//! not equality up to a tolerance. Every `f64` is itself a dyadic rational,
//! so conversion from floats is lossless.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout the oracle layer.
pub type Rat = BigRational;

/// Lossless conversion of a finite `f64` into a rational.
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| Error::Validation(format!("non-finite value {x}")))
}

/// Parse a rational from `"p/q"`, a decimal string, or an integer string.
///
/// Decimal inputs are read exactly: `"0.7"` becomes `7/10`, not the nearest
/// double. This is how matrix entries keep row sums exactly one.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let s = s.trim();
    let err = || Error::Validation(format!("cannot parse rational from {s:?}"));
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(Error::Validation(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = int.trim_start().starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| err())?
        };
        let frac_num: BigInt = frac.parse().map_err(|_| err())?;
        let den = BigInt::from(10u8).pow(frac.len() as u32);
        let frac_rat = Rat::new(frac_num, den);
        let int_rat = Rat::from_integer(int_part);
        return Ok(if negative { int_rat - frac_rat } else { int_rat + frac_rat });
    }
    let n: BigInt = s.parse().map_err(|_| err())?;
    Ok(Rat::from_integer(n))
}

/// Rational to `f64`, saturating rather than failing on extreme magnitudes.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `x mod 1` mapped into `[0, 1)`.
pub fn fract_mod_one(x: &Rat) -> Rat {
    let f = x - x.floor();
    debug_assert!(!f.is_negative() && f < Rat::one());
    f
}

/// Circle distance `min(|x-y|, 1-|x-y|)` for representatives in `[0, 1)`.
pub fn circle_dist(x: &Rat, y: &Rat) -> Rat {
    let d = fract_mod_one(&(x - y));
    let alt = Rat::one() - &d;
    if d <= alt {
        d
    } else {
        alt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_decimal_and_integer() {
        assert_eq!(rat_from_str("7/10").unwrap(), Rat::new(7.into(), 10.into()));
        assert_eq!(rat_from_str("0.7").unwrap(), Rat::new(7.into(), 10.into()));
        assert_eq!(rat_from_str("-0.25").unwrap(), Rat::new((-1).into(), 4.into()));
        assert_eq!(rat_from_str("3").unwrap(), Rat::from_integer(3.into()));
    }

    #[test]
    fn f64_conversion_is_lossless() {
        let r = rat_from_f64(0.1).unwrap();
        assert_eq!(rat_to_f64(&r), 0.1);
        // 0.1 is not 1/10 in binary
        assert_ne!(r, Rat::new(1.into(), 10.into()));
    }

    #[test]
    fn circle_distance_wraps() {
        let a = rat_from_str("0.9").unwrap();
        let b = rat_from_str("0.1").unwrap();
        assert_eq!(circle_dist(&a, &b), rat_from_str("0.2").unwrap());
    }

    #[test]
    fn rejects_zero_denominator() {
        assert!(rat_from_str("1/0").is_err());
    }
}
