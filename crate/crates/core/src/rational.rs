//! Exact rational helpers shared by every module.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 fails only when numerator or denominator overflow f64.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact binary value of a finite double.
pub fn from_f64_exact(x: f64) -> Rational {
    Rational::from_float(x).expect("finite double")
}

/// Best rational approximation with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let negative = x < 0.0;
    let target = from_f64_exact(x.abs());
    let max_den = BigInt::from(max_den.max(1));

    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    loop {
        let a = rest.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            // Largest semiconvergent that still fits.
            let k = (&max_den - &q0) / &q1;
            let cand = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
            let conv = Rational::new(p1.clone(), q1.clone());
            let best = if (&cand - &target).abs() < (&conv - &target).abs() {
                cand
            } else {
                conv
            };
            return if negative { -best } else { best };
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            let r = Rational::new(p1, q1);
            return if negative { -r } else { r };
        }
        rest = frac.recip();
    }
}

/// Parses `"1/3"`, `"-2"`, `"0.25"` or `"1e-3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim())
            .map_err(|_| Error::InvalidArgument(format!("bad numerator in {t:?}")))?;
        let d = BigInt::from_str(d.trim())
            .map_err(|_| Error::InvalidArgument(format!("bad denominator in {t:?}")))?;
        if d.is_zero() {
            return Err(Error::InvalidArgument(format!("zero denominator in {t:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Ok(n) = BigInt::from_str(t) {
        return Ok(Rational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(|| Error::InvalidArgument(format!("not a number: {t:?}")))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exp - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Some(if neg { -value } else { value })
}

/// Integer in JSON: a number when it fits in 64 bits, otherwise a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(v: &BigInt) -> Self {
        match v.to_i64() {
            Some(s) => JsonInt::Small(s),
            None => JsonInt::Big(v.to_string()),
        }
    }

    fn to_big(&self) -> Result<BigInt> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(*v)),
            JsonInt::Big(s) => BigInt::from_str(s)
                .map_err(|_| Error::InvalidArgument(format!("bad integer {s:?}"))),
        }
    }
}

/// `{"num": .., "den": ..}` wire form of an exact rational.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalJson {
    num: JsonInt,
    den: JsonInt,
}

impl RationalJson {
    pub fn to_rational(&self) -> Result<Rational> {
        let den = self.den.to_big()?;
        if den.is_zero() {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Ok(Rational::new(self.num.to_big()?, den))
    }
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: JsonInt::from_big(r.numer()),
            den: JsonInt::from_big(r.denom()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.25, 1_000_000), rat(1, 4));
        assert_eq!(rationalize(1.0 / 3.0, 1_000_000), rat(1, 3));
        assert_eq!(rationalize(-2.0 / 7.0, 1_000_000), rat(-2, 7));
        assert_eq!(rationalize(0.0, 10), int(0));
        assert_eq!(rationalize(std::f64::consts::PI, 1000), rat(355, 113));
    }

    #[test]
    fn rationalize_respects_denominator_cap() {
        let r = rationalize(std::f64::consts::E, 50);
        assert!(r.denom() <= &BigInt::from(50));
        assert!((to_f64(&r) - std::f64::consts::E).abs() < 1e-3);
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(parse_rational("1/3").unwrap(), rat(1, 3));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("-2").unwrap(), int(-2));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("2.5E1").unwrap(), int(25));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn json_form_switches_to_strings_for_big_values() {
        let big = Rational::new(BigInt::from(3), num_traits::pow(BigInt::from(10), 30));
        let js = serde_json::to_string(&RationalJson::from(&big)).unwrap();
        assert!(js.contains('"'));
        let back: RationalJson = serde_json::from_str(&js).unwrap();
        assert_eq!(back.to_rational().unwrap(), big);
        let small: RationalJson = serde_json::from_str(r#"{"num":1,"den":3}"#).unwrap();
        assert_eq!(small.to_rational().unwrap(), rat(1, 3));
    }
}
