//! Points of the circle `R/Z` with exact rational representatives.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num::integer::Integer;
use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Builds `numer / denom` from machine integers. Panics on a zero denominator.
pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim().replace('\u{2212}', "-");
    Rational::from_str(&t).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))
}

/// Serde adapter storing a rational as its `"p/q"` string.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A coset of `Z` in `R`, held as its representative in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CirclePoint(Rational);

impl CirclePoint {
    /// Reduces `r` mod 1.
    pub fn normalize(r: Rational) -> Self {
        let fl = r.floor();
        CirclePoint(r - fl)
    }

    pub fn zero() -> Self {
        CirclePoint(Rational::zero())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::normalize(ratio(numer, denom))
    }

    /// The representative in `[0, 1)`.
    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_value(self) -> Rational {
        self.0
    }

    /// Distance to the nearest integer, `min(v, 1 - v)`.
    pub fn norm(&self) -> Rational {
        let other = Rational::one() - &self.0;
        if other < self.0 {
            other
        } else {
            self.0.clone()
        }
    }

    /// Additive order: the reduced denominator of the representative.
    pub fn add_order_of(&self) -> u64 {
        self.denom_u64()
    }

    fn denom_u64(&self) -> u64 {
        u64::try_from(self.0.denom()).expect("order exceeds u64")
    }

    pub fn scalar_mul(&self, m: u64) -> CirclePoint {
        Self::normalize(&self.0 * int(m))
    }

    /// Circle distance `norm(self - other)`.
    pub fn dist(&self, other: &CirclePoint) -> Rational {
        (self - other).norm()
    }

    /// Distance to the nearest point of additive order exactly `n`.
    pub fn dist_to_order_n(&self, n: u64) -> Rational {
        assert!(n >= 1, "order must be positive");
        let mut best: Option<Rational> = None;
        for m in 0..n {
            if m.gcd(&n) != 1 {
                continue;
            }
            let d = self.dist(&CirclePoint::normalize(Rational::new(BigInt::from(m), BigInt::from(n))));
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
        best.expect("every n >= 1 has a unit residue")
    }
}

impl Default for CirclePoint {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<Rational> for CirclePoint {
    fn from(r: Rational) -> Self {
        Self::normalize(r)
    }
}

impl Add for &CirclePoint {
    type Output = CirclePoint;
    fn add(self, rhs: &CirclePoint) -> CirclePoint {
        CirclePoint::normalize(&self.0 + &rhs.0)
    }
}

impl Add for CirclePoint {
    type Output = CirclePoint;
    fn add(self, rhs: CirclePoint) -> CirclePoint {
        &self + &rhs
    }
}

impl Sub for &CirclePoint {
    type Output = CirclePoint;
    fn sub(self, rhs: &CirclePoint) -> CirclePoint {
        CirclePoint::normalize(&self.0 - &rhs.0)
    }
}

impl Sub for CirclePoint {
    type Output = CirclePoint;
    fn sub(self, rhs: CirclePoint) -> CirclePoint {
        &self - &rhs
    }
}

impl Neg for &CirclePoint {
    type Output = CirclePoint;
    fn neg(self) -> CirclePoint {
        CirclePoint::normalize(-&self.0)
    }
}

impl Neg for CirclePoint {
    type Output = CirclePoint;
    fn neg(self) -> CirclePoint {
        -&self
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for CirclePoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(CirclePoint::normalize)
    }
}

impl Serialize for CirclePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational_str::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for CirclePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        rational_str::deserialize(d).map(CirclePoint::normalize)
    }
}
