//! Exact rational scalars used for all base-tree coordinates.
//!
//! Base arithmetic is exact (`BigRational`); only final lengths that involve
//! square roots are converted to `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "p/q", "p", or a decimal like "0.25" into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let s = text.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational numerator in {s:?}")))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rat::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse()
                .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?
        };
        let frac_val: BigInt = frac
            .parse()
            .map_err(|_| Error::Parse(format!("bad decimal in {s:?}")))?;
        let den = BigInt::from(10u32).pow(digits);
        let num = &int * &den + if s.starts_with('-') { -frac_val } else { frac_val };
        return Ok(Rat::new(num, den));
    }
    let p: BigInt = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(Rat::from_integer(p))
}

/// Exact conversion: every finite `f64` is a dyadic rational.
pub fn rat_from_f64(x: f64) -> Result<Rat> {
    Rat::from_float(x).ok_or_else(|| Error::Parse(format!("non-finite number {x}")))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn rat_abs(x: &Rat) -> Rat {
    x.abs()
}

/// Formats a rational as "p/q" (or "p" when integral).
pub fn rat_display(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Euclidean distance in the plane with exact rational legs.
pub fn hypot_rat(a: &Rat, b: &Rat) -> f64 {
    rat_to_f64(a).hypot(rat_to_f64(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rat("1/4").unwrap(), rat_frac(1, 4));
        assert_eq!(parse_rat("3").unwrap(), rat_int(3));
        assert_eq!(parse_rat("0.25").unwrap(), rat_frac(1, 4));
        assert_eq!(parse_rat("-1.5").unwrap(), rat_frac(-3, 2));
        assert!(parse_rat("1/0").is_err());
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let r = rat_from_f64(0.1).unwrap();
        assert_eq!(rat_to_f64(&r), 0.1);
    }
}
