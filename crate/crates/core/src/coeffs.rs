//! Normed coefficient groups: `Z`, `Z/2` and `Q`.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientGroup {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "Z2")]
    IntegersMod2,
    #[serde(rename = "Q")]
    Rationals,
}

impl CoefficientGroup {
    pub fn tag(self) -> &'static str {
        match self {
            Self::Integers => "Z",
            Self::IntegersMod2 => "Z2",
            Self::Rationals => "Q",
        }
    }
}

impl fmt::Display for CoefficientGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for CoefficientGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Z" => Ok(Self::Integers),
            "Z2" | "Z/2" => Ok(Self::IntegersMod2),
            "Q" => Ok(Self::Rationals),
            other => Err(Error::Parse(format!("unknown coefficient group {other:?}"))),
        }
    }
}

/// Element of a normed abelian group usable as a chain coefficient.
///
/// The norm satisfies `|0| = 0`, `|-a| = |a|` and `|a + b| ≤ |a| + |b|`.
pub trait Coefficient:
    Clone
    + fmt::Debug
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const GROUP: CoefficientGroup;

    /// Image of an integer under `Z -> A`.
    fn from_int(k: i64) -> Self;

    fn norm(&self) -> BigRational;

    fn scale(&self, k: i64) -> Self {
        Self::from_int(k).mul_ref(self)
    }

    fn mul_ref(&self, other: &Self) -> Self;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;
}

impl Coefficient for i64 {
    const GROUP: CoefficientGroup = CoefficientGroup::Integers;

    fn from_int(k: i64) -> Self {
        k
    }

    fn norm(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self).abs())
    }

    fn scale(&self, k: i64) -> Self {
        self * k
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn to_json(&self) -> Value {
        Value::from(*self)
    }

    fn from_json(v: &Value) -> Result<Self> {
        v.as_i64()
            .ok_or_else(|| Error::Parse(format!("expected integer coefficient, got {v}")))
    }
}

/// Integers modulo 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod2(pub bool);

impl Mod2 {
    pub const ONE: Mod2 = Mod2(true);
}

impl Add for Mod2 {
    type Output = Mod2;
    fn add(self, rhs: Mod2) -> Mod2 {
        Mod2(self.0 ^ rhs.0)
    }
}

impl Sub for Mod2 {
    type Output = Mod2;
    fn sub(self, rhs: Mod2) -> Mod2 {
        Mod2(self.0 ^ rhs.0)
    }
}

impl Neg for Mod2 {
    type Output = Mod2;
    fn neg(self) -> Mod2 {
        self
    }
}

impl Zero for Mod2 {
    fn zero() -> Self {
        Mod2(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
}

impl Coefficient for Mod2 {
    const GROUP: CoefficientGroup = CoefficientGroup::IntegersMod2;

    fn from_int(k: i64) -> Self {
        Mod2(k.rem_euclid(2) == 1)
    }

    fn norm(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(u8::from(self.0)))
    }

    fn scale(&self, k: i64) -> Self {
        Mod2(self.0 && k.rem_euclid(2) == 1)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        Mod2(self.0 && other.0)
    }

    fn to_json(&self) -> Value {
        Value::from(u8::from(self.0))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v.as_u64() {
            Some(0) => Ok(Mod2(false)),
            Some(1) => Ok(Mod2(true)),
            _ => Err(Error::Parse(format!("expected 0 or 1 for Z2 coefficient, got {v}"))),
        }
    }
}

impl Coefficient for BigRational {
    const GROUP: CoefficientGroup = CoefficientGroup::Rationals;

    fn from_int(k: i64) -> Self {
        BigRational::from_integer(k.into())
    }

    fn norm(&self) -> BigRational {
        self.abs()
    }

    fn scale(&self, k: i64) -> Self {
        self * BigRational::from_integer(k.into())
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn to_json(&self) -> Value {
        Value::from(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => Ok(Self::from_int(n.as_i64().unwrap_or_default())),
            _ => Err(Error::Parse(format!("expected \"p/q\" rational, got {v}"))),
        }
    }
}

/// Canonical `"p/q"` form: reduced, `q > 0`, always with the slash.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Add two coefficients that arrived with runtime group tags.
pub fn add_tagged<A: Coefficient>(
    (ga, a): (CoefficientGroup, &A),
    (gb, b): (CoefficientGroup, &A),
) -> Result<A> {
    if ga != gb {
        return Err(Error::GroupMismatch {
            expected: ga.to_string(),
            found: gb.to_string(),
        });
    }
    Ok(a.clone() + b.clone())
}
