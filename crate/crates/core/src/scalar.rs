//! Scalar abstraction shared by the scoring rules and the protocol engine.
//!
//! Payments and probabilities are computed in any type implementing [`Scalar`].
//! [`crate::Rational`] (arbitrary precision) is the exact instantiation used for
//! every correctness check; `f64`/`f32` are available for quick estimates and
//! `Ratio<i64>` for bounded exact arithmetic.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Num, Zero};

use crate::error::MripError;

pub trait Scalar:
    Num + Clone + PartialOrd + Neg<Output = Self> + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    /// `numer / denom`; `denom` must be nonzero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_count(n: u64) -> Self;

    /// Exact rationals can be compared for equality; floats cannot.
    const EXACT: bool;

    /// Report rendering; exact types always print `"num/den"`.
    fn render(&self) -> String {
        self.to_string()
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn powu(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            base = base.clone() * base;
            e >>= 1;
        }
        acc
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_count(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for Ratio<i64> {
    const EXACT: bool = true;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn from_count(n: u64) -> Self {
        Ratio::from_integer(i64::try_from(n).expect("count exceeds i64"))
    }

    fn render(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        numer as f64 / denom as f64
    }

    fn from_count(n: u64) -> Self {
        n as f64
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        (numer as f64 / denom as f64) as f32
    }

    fn from_count(n: u64) -> Self {
        n as f32
    }
}

/// Renders a rational as `"num/den"`, always with an explicit denominator.
pub fn format_rational(value: &BigRational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `"num/den"` or a bare integer.
pub fn parse_rational(text: &str) -> Result<BigRational, MripError> {
    let bad = || MripError::Parse {
        line: 0,
        message: format!("not a rational: {text:?}"),
    };
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = d.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

/// Exact serde adapter: rationals travel as `"num/den"` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(value: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
            match value {
                Some(v) => s.serialize_str(&format_rational(v)),
                None => s.serialize_str("none"),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
            let text = String::deserialize(d)?;
            if text == "none" {
                return Ok(None);
            }
            parse_rational(&text).map(Some).map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn format_always_has_denominator() {
        assert_eq!(format_rational(&BigRational::from_count(1)), "1/1");
        assert_eq!(format_rational(&BigRational::from_ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&BigRational::zero()), "0/1");
    }

    #[test]
    fn parse_accepts_both_forms() {
        assert_eq!(parse_rational("2/11").unwrap(), BigRational::from_ratio(2, 11));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::from_count(3).neg());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn powu_matches_repeated_product() {
        let x = BigRational::from_ratio(7, 8);
        let mut acc = BigRational::one();
        for e in 0..12u32 {
            assert_eq!(x.powu(e), acc);
            acc = acc * x.clone();
        }
        assert!((0.5f64.powu(3) - 0.125).abs() < 1e-12);
    }
}
