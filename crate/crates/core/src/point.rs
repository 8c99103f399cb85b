use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::plonka::SPoint;
use crate::rational::{self, Rational};

/// A point of some algebra handle.
///
/// Ambient handles work on `Exact` or `Float` values in `[0,1]`; constructed
/// algebras work on structured points.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Exact(Rational),
    Float(f64),
    Structured(SPoint),
}

impl Point {
    pub fn exact(n: i64, d: i64) -> Self {
        Point::Exact(rational::ratio(n, d))
    }

    pub fn zero() -> Self {
        Point::Exact(rational::zero())
    }

    pub fn one() -> Self {
        Point::Exact(rational::one())
    }

    /// Ambient value as a float (structured points through their embedding).
    pub fn to_f64(&self) -> f64 {
        match self {
            Point::Exact(q) => rational::to_f64(q),
            Point::Float(v) => *v,
            Point::Structured(s) => s.embed(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Point::Exact(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_structured(&self) -> Option<&SPoint> {
        match self {
            Point::Structured(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Point::Float(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Point::Exact(q) => q.is_zero(),
            Point::Float(v) => *v == 0.0,
            Point::Structured(s) => s.base.is_zero() && s.offset.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Point::Exact(q) => q.is_one(),
            Point::Float(v) => *v == 1.0,
            Point::Structured(s) => s.embed_exact().is_some_and(|q| q.is_one()),
        }
    }

    /// Checks that an ambient point lies in `[0,1]`.
    pub fn check_unit(&self) -> Result<()> {
        let ok = match self {
            Point::Exact(q) => rational::in_unit(q),
            Point::Float(v) => (0.0..=1.0).contains(v),
            Point::Structured(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{self} is outside [0,1]")))
        }
    }

    /// Ambient order. Exact comparisons where both sides are exact.
    pub fn ambient_cmp(&self, other: &Point) -> Ordering {
        match (self, other) {
            (Point::Exact(a), Point::Exact(b)) => a.cmp(b),
            (Point::Structured(a), Point::Structured(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Exact(q) => f.write_str(&rational::display(q)),
            Point::Float(v) => write!(f, "{v}"),
            Point::Structured(s) => write!(f, "{s}"),
        }
    }
}

impl From<Rational> for Point {
    fn from(q: Rational) -> Self {
        Point::Exact(q)
    }
}

impl From<SPoint> for Point {
    fn from(s: SPoint) -> Self {
        Point::Structured(s)
    }
}

/// A convex-combination parameter `p ∈ [0,1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Param(Rational);

impl Param {
    pub fn new(p: Rational) -> Result<Self> {
        if rational::in_unit(&p) {
            Ok(Param(p))
        } else {
            Err(Error::Domain(format!("parameter {} is outside [0,1]", rational::display(&p))))
        }
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Param::new(rational::ratio(n, d)).expect("parameter in [0,1]")
    }

    pub fn half() -> Self {
        Param(rational::half())
    }

    pub fn one() -> Self {
        Param(rational::one())
    }

    pub fn zero() -> Self {
        Param(rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// `1 - p`.
    pub fn complement(&self) -> Param {
        Param(rational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        rational::to_f64(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&rational::display(&self.0))
    }
}
