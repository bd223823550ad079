//! Finite-dimensional Riesz-space model.
//!
//! The space of dimension `n` is `Q^n` with the coordinatewise order. The weak
//! order unit `e` is the all-ones vector and is never stored per element. Every
//! element is `e`-bounded, so the f-algebra of `e`-bounded elements is the whole
//! space with coordinatewise multiplication and unit `e`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceDescriptor {
    dimension: usize,
}

impl SpaceDescriptor {
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(SpaceDescriptor { dimension })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// The weak order unit `e`.
    pub fn unit(&self) -> Element {
        Element {
            coords: vec![Rational::one(); self.dimension],
        }
    }

    pub fn zero(&self) -> Element {
        Element {
            coords: vec![Rational::zero(); self.dimension],
        }
    }

    pub fn basis(&self, i: usize) -> Component {
        Component::basis(self.dimension, i)
    }

    /// All `2^n` components of `e`, in binary-counting order (bit `i` of the
    /// counter is coordinate `i`).
    pub fn components(&self) -> impl Iterator<Item = Component> + '_ {
        assert!(self.dimension < 64, "component enumeration needs n < 64");
        let n = self.dimension;
        (0u64..(1u64 << n)).map(move |mask| Component {
            bits: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        })
    }

    pub fn check(&self, x: &Element) -> Result<()> {
        check_dim(self.dimension, x.dimension())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A vector of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    coords: Vec<Rational>,
}

impl Element {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptySpace);
        }
        Ok(Element { coords })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn from_ratios(values: &[(i64, i64)]) -> Result<Self> {
        Self::new(values.iter().map(|&(p, q)| rational::ratio(p, q)).collect())
    }

    /// `c * e` in a space of dimension `n`.
    pub fn constant(n: usize, c: Rational) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn space(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            dimension: self.coords.len(),
        }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.coords
    }

    pub fn get(&self, i: usize) -> &Rational {
        &self.coords[i]
    }

    fn zip_with(&self, other: &Element, f: impl Fn(&Rational, &Rational) -> Rational) -> Result<Element> {
        check_dim(self.dimension(), other.dimension())?;
        Ok(Element {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect(),
        })
    }

    fn map(&self, f: impl Fn(&Rational) -> Rational) -> Element {
        Element {
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn meet(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a.min(b).clone())
    }

    pub fn join(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a.max(b).clone())
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Multiplication in the f-algebra: coordinatewise product.
    pub fn f_product(&self, other: &Element) -> Result<Element> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn abs(&self) -> Element {
        self.map(|a| a.abs())
    }

    pub fn neg(&self) -> Element {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: &Rational) -> Element {
        self.map(|a| a * c)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn is_positive(&self) -> bool {
        self.coords.iter().all(|a| !a.is_negative())
    }

    /// `self <= other` in the coordinatewise order.
    pub fn le(&self, other: &Element) -> Result<bool> {
        check_dim(self.dimension(), other.dimension())?;
        Ok(self.coords.iter().zip(&other.coords).all(|(a, b)| a <= b))
    }

    /// Sup norm `max_i |x_i|`.
    pub fn sup_norm(&self) -> Rational {
        self.coords
            .iter()
            .map(|a| a.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// True iff every coordinate is 0 or 1, i.e. `0 <= p <= e` and `p ∧ (e - p) = 0`.
    pub fn is_component(&self) -> bool {
        self.coords.iter().all(|a| a.is_zero() || a.is_one())
    }

    pub fn to_component(&self) -> Result<Component> {
        self.coords
            .iter()
            .enumerate()
            .map(|(index, a)| {
                if a.is_zero() {
                    Ok(false)
                } else if a.is_one() {
                    Ok(true)
                } else {
                    Err(Error::NotAComponent {
                        index,
                        value: rational::format(a),
                    })
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(|bits| Component { bits })
    }

    /// Sum of a nonempty iterator of elements of equal dimension.
    pub fn sum<'a>(mut items: impl Iterator<Item = &'a Element>) -> Result<Element> {
        let first = items.next().ok_or(Error::EmptySequence)?.clone();
        items.try_fold(first, |acc, x| acc.add(x))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Element {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::vec::serialize(&self.coords, s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = rational::vec::deserialize(d)?;
        Element::new(coords).map_err(serde::de::Error::custom)
    }
}

/// A component of `e`: a 0/1 vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Component {
    bits: Vec<bool>,
}

impl Component {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptySpace);
        }
        Ok(Component { bits })
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut bits = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: i + 1,
                });
            }
            bits[i] = true;
        }
        Self::new(bits)
    }

    pub fn unit(n: usize) -> Self {
        Component { bits: vec![true; n] }
    }

    pub fn zero(n: usize) -> Self {
        Component { bits: vec![false; n] }
    }

    /// The basis component `delta_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut bits = vec![false; n];
        bits[i] = true;
        Component { bits }
    }

    pub fn dimension(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    /// `e - p`.
    pub fn complement(&self) -> Component {
        Component {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn meet(&self, other: &Component) -> Result<Component> {
        check_dim(self.dimension(), other.dimension())?;
        Ok(Component {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a && *b).collect(),
        })
    }

    pub fn join(&self, other: &Component) -> Result<Component> {
        check_dim(self.dimension(), other.dimension())?;
        Ok(Component {
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| *a || *b).collect(),
        })
    }

    pub fn le(&self, other: &Component) -> Result<bool> {
        check_dim(self.dimension(), other.dimension())?;
        Ok(self.bits.iter().zip(&other.bits).all(|(a, b)| !a || *b))
    }

    pub fn to_element(&self) -> Element {
        Element {
            coords: self
                .bits
                .iter()
                .map(|&b| if b { Rational::one() } else { Rational::zero() })
                .collect(),
        }
    }

    /// The band projection `P f = p f` generated by this component.
    pub fn project(&self, f: &Element) -> Result<Element> {
        check_dim(self.dimension(), f.dimension())?;
        Ok(Element {
            coords: self
                .bits
                .iter()
                .zip(&f.coords)
                .map(|(&b, a)| if b { a.clone() } else { Rational::zero() })
                .collect(),
        })
    }
}

impl Serialize for Component {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.bits.iter().map(|&b| u8::from(b)))
    }
}

impl<'de> Deserialize<'de> for Component {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        let bits = raw
            .into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!("component bit {other} is not 0 or 1"))),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Component::new(bits).map_err(serde::de::Error::custom)
    }
}

pub fn meet(a: &Element, b: &Element) -> Result<Element> {
    a.meet(b)
}

pub fn join(a: &Element, b: &Element) -> Result<Element> {
    a.join(b)
}

pub fn f_product(a: &Element, b: &Element) -> Result<Element> {
    a.f_product(b)
}

pub fn is_component(a: &Element) -> bool {
    a.is_component()
}

pub fn band_project(p: &Component, f: &Element) -> Result<Element> {
    p.project(f)
}

/// The component generating the band of a positive element: its support.
pub fn component_of_band(x: &Element) -> Result<Component> {
    if let Some(index) = x.coords.iter().position(|a| a.is_negative()) {
        return Err(Error::NegativeInput { index });
    }
    Ok(Component {
        bits: x.coords.iter().map(|a| a.is_positive()).collect(),
    })
}
