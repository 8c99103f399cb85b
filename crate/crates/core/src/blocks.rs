//! The four closed-form example algebras on `[0,1]` and the rescaling
//! isomorphisms between intervals with linear operations.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::point::{Param, Point};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// `p·x + (1-p)·y`.
    Linear,
    /// `max{x, y}`.
    Max,
    /// Linear below `1`, with `1` absorbing.
    Cap,
    /// `1 - (1-x)^p (1-y)^(1-p)`.
    Exp,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] = [BlockKind::Linear, BlockKind::Max, BlockKind::Cap, BlockKind::Exp];

    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Linear => "linear",
            BlockKind::Max => "max",
            BlockKind::Cap => "cap",
            BlockKind::Exp => "exp",
        }
    }

    /// Whether combinations of exact inputs stay exact.
    pub fn is_exact(self) -> bool {
        !matches!(self, BlockKind::Exp)
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlockKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(BlockKind::Linear),
            "max" => Ok(BlockKind::Max),
            "cap" => Ok(BlockKind::Cap),
            "exp" => Ok(BlockKind::Exp),
            other => Err(Error::Parse(format!("unknown block {other:?} (linear|max|cap|exp)"))),
        }
    }
}

fn ambient(x: &Point) -> Result<()> {
    if matches!(x, Point::Structured(_)) {
        return Err(Error::Domain(format!("block algebras take ambient points, got {x}")));
    }
    x.check_unit()
}

fn linear(x: &Point, y: &Point, p: &Param) -> Point {
    match (x, y) {
        (Point::Exact(a), Point::Exact(b)) => {
            let p = p.value();
            Point::Exact(p * a + (rational::one() - p) * b)
        }
        _ => {
            let p = p.to_f64();
            Point::Float(p * x.to_f64() + (1.0 - p) * y.to_f64())
        }
    }
}

/// `x ⊕_p y` in the given example algebra.
pub fn block_combine(kind: BlockKind, x: &Point, y: &Point, p: &Param) -> Result<Point> {
    ambient(x)?;
    ambient(y)?;
    if p.is_one() {
        return Ok(x.clone());
    }
    if p.is_zero() {
        return Ok(y.clone());
    }
    Ok(match kind {
        BlockKind::Linear => linear(x, y, p),
        BlockKind::Max => {
            if x.ambient_cmp(y).is_ge() {
                x.clone()
            } else {
                y.clone()
            }
        }
        BlockKind::Cap => {
            if x.is_one() || y.is_one() {
                Point::one()
            } else {
                linear(x, y, p)
            }
        }
        BlockKind::Exp => {
            if x == y {
                x.clone()
            } else if x.is_one() || y.is_one() {
                Point::one()
            } else {
                let p = p.to_f64();
                let v = 1.0 - (1.0 - x.to_f64()).powf(p) * (1.0 - y.to_f64()).powf(1.0 - p);
                Point::Float(v.clamp(0.0, 1.0))
            }
        }
    })
}

/// `f(t) = 1 - e^(-t)`, the increasing bijection `[0,∞] → [0,1]` that turns
/// averaging on the extended half-line into the exponential block.
pub fn exp_embed(t: f64) -> f64 {
    if t.is_infinite() {
        1.0
    } else {
        -(-t).exp_m1()
    }
}

/// Inverse of [`exp_embed`].
pub fn exp_unembed(x: f64) -> f64 {
    if x >= 1.0 {
        f64::INFINITY
    } else {
        -(-x).ln_1p()
    }
}

/// Right end of an interval `[0, τ)` or `[0, τ]` carrying linear operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Finite(Rational),
    Infinity,
}

/// Which member of the isomorphism family to use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoChoice {
    /// Half-open finite intervals: the unique isomorphism, multiplication by `τ'/τ`.
    HalfOpen,
    /// Closed finite intervals: scaling (`reverse = false`) or the reversal.
    Closed { reverse: bool },
    /// `[0,∞)` onto itself: multiplication by the given `t > 0`.
    Scaling(Rational),
}

/// Isomorphisms between intervals `[0,τ)` / `[0,τ]` with linear operations.
pub fn interval_iso(from: &Endpoint, to: &Endpoint, x: &Rational, choice: &IsoChoice) -> Result<Rational> {
    if x.is_negative() {
        return Err(Error::Domain(format!("{} is negative", rational::display(x))));
    }
    match (from, to) {
        (Endpoint::Finite(a), Endpoint::Finite(b)) => {
            if !a.is_positive() || !b.is_positive() {
                return Err(Error::Precondition("interval lengths must be positive".into()));
            }
            let closed = matches!(choice, IsoChoice::Closed { .. });
            if x > a || (x == a && !closed) {
                return Err(Error::Domain(format!(
                    "{} is outside the source interval",
                    rational::display(x)
                )));
            }
            let scaled = x * b / a;
            match choice {
                IsoChoice::HalfOpen | IsoChoice::Closed { reverse: false } => Ok(scaled),
                IsoChoice::Closed { reverse: true } => Ok(b - scaled),
                IsoChoice::Scaling(_) => Err(Error::Precondition(
                    "finite intervals have no free scaling parameter".into(),
                )),
            }
        }
        (Endpoint::Infinity, Endpoint::Infinity) => match choice {
            IsoChoice::Scaling(t) if t.is_positive() => Ok(t * x),
            IsoChoice::HalfOpen => Ok(x.clone()),
            _ => Err(Error::Precondition(
                "automorphisms of [0,∞) are the scalings x ↦ t·x with t > 0".into(),
            )),
        },
        _ => Err(Error::MixedEndpoint),
    }
}

impl Endpoint {
    pub fn one() -> Self {
        Endpoint::Finite(rational::one())
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Endpoint::Finite(t) if t.is_one())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Endpoint::Finite(t) if t.is_zero())
    }
}
