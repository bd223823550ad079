//! Exact rationals and their wire format.
//!
//! On the wire a rational is a string, either an integer (`"3"`, `"-2"`) or a
//! reduced fraction with positive denominator (`"1/4"`). Integer JSON numbers
//! are accepted on input.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Deserializer, Visitor};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::ParseRational(s.to_owned()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|_| Error::ParseRational(s.to_owned()))?;
        let den = BigInt::from_str(d.trim()).map_err(|_| Error::ParseRational(s.to_owned()))?;
        if den.is_zero() {
            return Err(Error::ParseRational(s.to_owned()));
        }
        Ok(Rational::new(num, den))
    } else {
        let num = BigInt::from_str(t).map_err(|_| Error::ParseRational(s.to_owned()))?;
        Ok(Rational::from_integer(num))
    }
}

/// `BigRational`'s `Display` already prints the reduced `p/q` or `p` form.
pub fn format(r: &Rational) -> String {
    r.to_string()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
    struct RationalVisitor;

    impl Visitor<'_> for RationalVisitor {
        type Value = Rational;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a rational string such as \"3/4\" or an integer")
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
            parse(v).map_err(E::custom)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
            Ok(int(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
            Ok(Rational::from_integer(BigInt::from(v)))
        }
    }

    d.deserialize_any(RationalVisitor)
}

/// Serde adapter for `Vec<Rational>`.
pub(crate) mod vec {
    use serde::de::{Deserializer, SeqAccess, Visitor};
    use serde::ser::{SerializeSeq, Serializer};

    use super::Rational;

    struct Wrap(Rational);

    impl<'de> serde::Deserialize<'de> for Wrap {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            super::deserialize(d).map(Wrap)
        }
    }

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Vec<Rational>;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array of rationals")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut a: A) -> Result<Vec<Rational>, A::Error> {
                let mut out = Vec::with_capacity(a.size_hint().unwrap_or(0));
                while let Some(Wrap(r)) = a.next_element()? {
                    out.push(r);
                }
                Ok(out)
            }
        }
        d.deserialize_seq(V)
    }
}
