//! Real numbers that stay exact when they start out rational.
//!
//! Lattice classification and displacement binning are exact questions when
//! the inputs are rational, so every user-facing numeric field is a
//! [`Scalar`]: either an exact [`BigRational`] or a plain `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum Scalar {
    Rational(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(value: i64) -> Self {
        Scalar::Rational(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn value(&self) -> f64 {
        match self {
            Scalar::Rational(q) => rational_to_f64(q),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Float(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            _ => Scalar::Float(self.value() * other.value()),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            _ => Scalar::Float(self.value() + other.value()),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            _ => Scalar::Float(self.value() - other.value()),
        }
    }

    /// Exact comparison when both sides are rational, `f64::total_cmp` otherwise.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            _ => self.value().total_cmp(&other.value()),
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        items
            .into_iter()
            .fold(Scalar::integer(0), |acc, x| acc.add(x))
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Float(a), Scalar::Float(b)) => a.to_bits() == b.to_bits(),
            _ => false,
        }
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<BigRational> for Scalar {
    fn from(q: BigRational) -> Self {
        Scalar::Rational(q)
    }
}

/// `p/q` for rationals (bare `p` when integral), shortest round-trip form for floats.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Scalar::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Scalar::Float(x) => write!(f, "{x:?}"),
        }
    }
}

/// Parses `p/q`, integers and finite decimals (with optional exponent) exactly.
impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s.trim())
            .map(Scalar::Rational)
            .ok_or_else(|| Error::InvalidInput(format!("cannot parse {s:?} as a rational number")))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_rational(num.trim())?;
        let den = parse_rational(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all_digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all_digits.is_empty() { "0" } else { &all_digits }).ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Correctly scaled conversion; `BigRational::to_f64` overflows on large parts.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = q.numer().bits() as i64 - q.denom().bits() as i64;
    let scaled = if shift > 0 {
        q / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        q * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let n = scaled.numer().to_f64().unwrap_or(f64::NAN);
    let d = scaled.denom().to_f64().unwrap_or(f64::NAN);
    n / d * 2f64.powi(shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!("8/3".parse::<Scalar>().unwrap(), Scalar::ratio(8, 3));
        assert_eq!("0.25".parse::<Scalar>().unwrap(), Scalar::ratio(1, 4));
        assert_eq!("-3".parse::<Scalar>().unwrap(), Scalar::integer(-3));
        assert_eq!("2.5e-1".parse::<Scalar>().unwrap(), Scalar::ratio(1, 4));
        assert_eq!("1/0.5".parse::<Scalar>().unwrap(), Scalar::integer(2));
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
        assert!("".parse::<Scalar>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["8/3", "-1/2", "7", "0"] {
            assert_eq!(s.parse::<Scalar>().unwrap().to_string(), s);
        }
        assert_eq!(Scalar::Float(0.1).to_string(), "0.1");
    }

    #[test]
    fn mixed_arithmetic_degrades_to_float() {
        let a = Scalar::ratio(1, 2);
        assert!(a.add(&Scalar::ratio(1, 3)).is_exact());
        assert!(!a.add(&Scalar::Float(0.25)).is_exact());
        assert_eq!(a.mul(&Scalar::Float(0.5)).value(), 0.25);
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::new(num::pow(BigInt::from(10), 400), num::pow(BigInt::from(10), 399));
        assert!((rational_to_f64(&big) - 10.0).abs() < 1e-12);
    }
}
