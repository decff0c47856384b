//! Exact rational numbers and nonnegative radii.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for every coordinate and predicate.
pub type Q = Ratio<i128>;

pub fn q(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// Parses `"3"`, `"-7/4"` or a finite decimal such as `"0.05"` into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Input(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 30 {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int_part: i128 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let den = 10i128.pow(frac.len() as u32);
        let num = int_part * den + frac.parse::<i128>().map_err(|_| bad())?;
        return Ok(Q::new(if neg { -num } else { num }, den));
    }
    s.parse::<i128>().map(Q::from_integer).map_err(|_| bad())
}

pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn q_to_f64(v: &Q) -> f64 {
    v.numer().to_f64().unwrap_or(f64::NAN) / v.denom().to_f64().unwrap_or(f64::NAN)
}

/// A nonnegative radius. It stands for the entourage of all pairs at
/// sup-distance at most `r`; composing entourages adds radii.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scale(Q);

impl Scale {
    pub const ZERO: Scale = Scale(Ratio::new_raw(0, 1));

    pub fn new(r: Q) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Input(format!("negative scale {}", fmt_q(&r))));
        }
        Ok(Scale(r))
    }

    pub fn int(r: u32) -> Self {
        Scale(qi(r as i128))
    }

    pub fn ratio(n: u32, d: u32) -> Self {
        Scale(q(n as i128, d as i128))
    }

    pub fn value(&self) -> Q {
        self.0
    }

    /// Entourage composition `self ∘ other`.
    pub fn compose(self, other: Scale) -> Scale {
        Scale(self.0 + other.0)
    }

    /// The `k`-fold composite of this entourage (the zero-fold one is the diagonal).
    pub fn power(self, k: u32) -> Scale {
        Scale(self.0 * qi(k as i128))
    }

    /// `self - other`, or `None` if that would be negative.
    pub fn checked_sub(self, other: Scale) -> Option<Scale> {
        (self.0 >= other.0).then(|| Scale(self.0 - other.0))
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.0)
    }
}

impl Add for Scale {
    type Output = Scale;
    fn add(self, rhs: Scale) -> Scale {
        self.compose(rhs)
    }
}

impl Sub for Scale {
    type Output = Scale;
    /// Saturates at zero.
    fn sub(self, rhs: Scale) -> Scale {
        self.checked_sub(rhs).unwrap_or(Scale::ZERO)
    }
}

impl Mul<u32> for Scale {
    type Output = Scale;
    fn mul(self, k: u32) -> Scale {
        self.power(k)
    }
}

impl Sum for Scale {
    fn sum<I: Iterator<Item = Scale>>(iter: I) -> Scale {
        iter.fold(Scale::ZERO, Add::add)
    }
}

impl TryFrom<Q> for Scale {
    type Error = Error;
    fn try_from(v: Q) -> Result<Self> {
        Scale::new(v)
    }
}

impl From<u32> for Scale {
    fn from(v: u32) -> Self {
        Scale::int(v)
    }
}

impl FromStr for Scale {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scale::new(parse_q(s)?)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_q(&self.0))
    }
}

impl fmt::Debug for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scale({self})")
    }
}

/// Rationals travel through JSON as integers when integral and as `"p/q"` strings otherwise.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_integer() {
            if let Some(i) = v.numer().to_i64() {
                return s.serialize_i64(i);
            }
        }
        s.serialize_str(&fmt_q(v))
    }

    pub fn serialize_vec<S: Serializer>(v: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&super::QJson(*x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_q(&v).map_err(serde::de::Error::custom)
    }

    pub fn value_to_q(v: &serde_json::Value) -> Result<Q> {
        match v {
            serde_json::Value::Number(n) => parse_q(&n.to_string()),
            serde_json::Value::String(s) => parse_q(s),
            other => Err(Error::Input(format!("expected a number, got {other}"))),
        }
    }
}

impl Serialize for Scale {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde_q::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Scale {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_q::deserialize(d)?;
        Scale::new(v).map_err(serde::de::Error::custom)
    }
}

impl Zero for Scale {
    fn zero() -> Self {
        Scale::ZERO
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

/// A rational serialized through [`serde_q`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QJson(#[serde(with = "serde_q")] pub Q);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_fraction_and_integer() {
        assert_eq!(parse_q("0.05").unwrap(), q(1, 20));
        assert_eq!(parse_q("-7/4").unwrap(), q(-7, 4));
        assert_eq!(parse_q("12").unwrap(), qi(12));
        assert_eq!(parse_q("-0.5").unwrap(), q(-1, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn composition_is_addition() {
        let r = Scale::ratio(3, 2);
        assert_eq!(r.compose(Scale::int(1)), Scale::ratio(5, 2));
        assert_eq!(r.power(0), Scale::ZERO);
        assert_eq!(r.power(4), Scale::int(6));
        assert!(Scale::new(qi(-1)).is_err());
        assert_eq!(Scale::int(1) - Scale::int(3), Scale::ZERO);
    }

    #[test]
    fn json_forms() {
        let s: Scale = serde_json::from_str("\"3/2\"").unwrap();
        assert_eq!(s, Scale::ratio(3, 2));
        let s: Scale = serde_json::from_str("0.25").unwrap();
        assert_eq!(s, Scale::ratio(1, 4));
        assert_eq!(serde_json::to_string(&Scale::int(4)).unwrap(), "4");
        assert_eq!(serde_json::to_string(&Scale::ratio(1, 3)).unwrap(), "\"1/3\"");
    }
}
