//! Extended real numbers `R ∪ {−∞, +∞}` without NaN.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A non-NaN `f64`, with `±∞` standing for the extended values.
///
/// Addition saturates (`∞ + a = ∞` for finite `a`); `∞ + (−∞)` is an error
/// via [`ExtReal::checked_add`].
#[derive(Clone, Copy, PartialEq, Default)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const NEG_INFINITY: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber)
        } else {
            Ok(ExtReal(v))
        }
    }

    /// Wraps a value produced by arithmetic that cannot yield NaN.
    ///
    /// NaN is mapped to `+∞`, which is the conservative reading for the
    /// objective values handled here (an undefined value is "not attained").
    pub fn from_f64(v: f64) -> Self {
        if v.is_nan() {
            ExtReal(f64::INFINITY)
        } else {
            ExtReal(v)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_neg_inf(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn checked_add(self, other: ExtReal) -> Result<ExtReal> {
        if (self.is_pos_inf() && other.is_neg_inf()) || (self.is_neg_inf() && other.is_pos_inf()) {
            Err(Error::IndeterminateSum)
        } else {
            Ok(ExtReal(self.0 + other.0))
        }
    }

    /// Adds a finite real number.
    pub fn add_finite(self, a: f64) -> ExtReal {
        debug_assert!(a.is_finite());
        ExtReal(self.0 + a)
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // -0.0 and 0.0 compare equal, unlike under total_cmp.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl std::ops::Neg for ExtReal {
    type Output = ExtReal;

    fn neg(self) -> ExtReal {
        ExtReal(-self.0)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_pos_inf() {
            f.write_str("inf")
        } else if self.is_neg_inf() {
            f.write_str("-inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(ExtReal(v)),
            Raw::Text(t) => parse_ext(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Serializes an `f64` field the way [`ExtReal`] does, with infinities as
/// `"inf"` and `"-inf"`.
pub fn serialize_f64<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    ExtReal::from_f64(*v).serialize(s)
}

/// Parses a decimal number or one of `inf`, `+inf`, `-inf`.
pub fn parse_ext(text: &str) -> std::result::Result<ExtReal, String> {
    match text.trim() {
        "inf" | "+inf" => Ok(ExtReal::INFINITY),
        "-inf" => Ok(ExtReal::NEG_INFINITY),
        t => match t.parse::<f64>() {
            Ok(v) if !v.is_nan() => Ok(ExtReal(v)),
            _ => Err(format!("not an extended real: {t:?}")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturating_and_indeterminate_sums() {
        let inf = ExtReal::INFINITY;
        assert_eq!(inf.checked_add(ExtReal::from(3.0)).unwrap(), inf);
        assert_eq!(inf.add_finite(-5.0), inf);
        assert_eq!(
            inf.checked_add(ExtReal::NEG_INFINITY),
            Err(Error::IndeterminateSum)
        );
        assert!(ExtReal::new(f64::NAN).is_err());
    }

    #[test]
    fn ordering_is_total() {
        let mut v = [
            ExtReal::INFINITY,
            ExtReal::from(1.0),
            ExtReal::NEG_INFINITY,
            ExtReal::from(-2.0),
        ];
        v.sort();
        assert_eq!(v[0], ExtReal::NEG_INFINITY);
        assert_eq!(v[3], ExtReal::INFINITY);
        assert_eq!(ExtReal::from(0.0), ExtReal::from(-0.0));
    }

    #[test]
    fn text_round_trip() {
        for v in [ExtReal::INFINITY, ExtReal::NEG_INFINITY, ExtReal::from(0.25)] {
            assert_eq!(parse_ext(&v.to_string()).unwrap(), v);
            let json = serde_json::to_string(&v).unwrap();
            let back: ExtReal = serde_json::from_str(&json).unwrap();
            assert_eq!(back, v);
        }
        assert_eq!(serde_json::to_string(&ExtReal::INFINITY).unwrap(), "\"inf\"");
    }
}
