//! Exact rationals and their textual encoding.
//!
//! Rationals are written as `"p/q"` (or a bare integer when `q = 1`) and
//! read back from either a string of that form or a JSON integer.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{t:?}: zero denominator")));
        }
        Ok(Rational::new(n, d))
    } else {
        BigInt::from_str(t)
            .map(Rational::from_integer)
            .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
    }
}

pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale down through the decimal expansion.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

pub fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn min_of<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    xs.into_iter().min().cloned()
}

pub fn max_of<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Option<Rational> {
    xs.into_iter().max().cloned()
}

/// Serde adapter: a rational as a `"p/q"` string, accepting integers on input.
pub mod serde_rational {
    use super::*;
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    struct RatVisitor;

    impl<'de> Visitor<'de> for RatVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("a rational as \"p/q\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
            parse_rational(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
            if v.fract() == 0.0 && v.abs() < 9.0e15 {
                Ok(int(v as i64))
            } else {
                Err(E::custom(format!(
                    "non-integer number {v}; encode rationals as \"p/q\""
                )))
            }
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        d.deserialize_any(RatVisitor)
    }
}

/// Serde adapter for `Vec<Rational>`.
pub mod serde_rational_vec {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::serde_rational")] Rational);

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let w: Vec<String> = v.iter().map(format_rational).collect();
        w.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<Rational>, D::Error> {
        let w: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(w.into_iter().map(|Wrap(r)| r).collect())
    }
}

/// Serde adapter for `Option<(Rational, Rational)>`.
pub mod serde_rational_pair_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "super::serde_rational")] Rational);

    pub fn serialize<S: Serializer>(
        v: &Option<(Rational, Rational)>,
        s: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|(a, b)| [format_rational(a), format_rational(b)])
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Option<(Rational, Rational)>, D::Error> {
        let w: Option<(Wrap, Wrap)> = Option::deserialize(d)?;
        Ok(w.map(|(Wrap(a), Wrap(b))| (a, b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("3/24").unwrap(), rat(1, 8));
        assert_eq!(parse_rational(" -7 ").unwrap(), int(-7));
        assert_eq!(parse_rational("4/-6").unwrap(), rat(-2, 3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn format_round_trips() {
        for r in [rat(35, 44), int(0), rat(-32, 1), rat(5, 6)] {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn simple_helpers() {
        assert_eq!(sign(&rat(-1, 3)), -1);
        assert!(is_integral(&rat(6, 3)));
        assert_eq!(to_f64(&rat(1, 4)), 0.25);
        assert_eq!(min_of(&[rat(1, 2), rat(1, 8)]), Some(rat(1, 8)));
    }
}
