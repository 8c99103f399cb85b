//! Deliberately broken operations that a law checker must reject.

use crate::algebra::{AlgebraHandle, ExactOp};
use crate::blocks::BlockKind;
use crate::rational::{self, Rational};

/// `p²x + (1-p²)y`: monotone and continuous, but not commutative.
pub fn psq() -> AlgebraHandle {
    AlgebraHandle::Exact(ExactOp {
        name: "psq",
        f: |x, y, p| {
            let p2 = p * p;
            &p2 * x + (rational::one() - p2) * y
        },
    })
}

/// `0` absorbing, linear elsewhere: fails (UC), (LC) and cancellation.
pub fn dualcap() -> AlgebraHandle {
    AlgebraHandle::Exact(ExactOp {
        name: "dualcap",
        f: |x, y, p| {
            if num_traits::Zero::is_zero(x) || num_traits::Zero::is_zero(y) {
                rational::zero()
            } else {
                linear(x, y, p)
            }
        },
    })
}

/// `max{x,y}` once either argument exceeds `1/2`, linear below.
///
/// A Plonka sum over the non-closed index set `{0} ∪ (1/2,1]`: a monotone
/// convex algebra that breaks (UC) along the threshold.
pub fn threshold() -> AlgebraHandle {
    AlgebraHandle::Exact(ExactOp {
        name: "threshold",
        f: |x, y, p| {
            let m = if x >= y { x.clone() } else { y.clone() };
            if m > rational::half() {
                m
            } else {
                linear(x, y, p)
            }
        },
    })
}

fn linear(x: &Rational, y: &Rational, p: &Rational) -> Rational {
    p * x + (rational::one() - p) * y
}

/// Looks up a fixture by name.
pub fn by_name(name: &str) -> Option<AlgebraHandle> {
    match name {
        "psq" => Some(psq()),
        "dualcap" => Some(dualcap()),
        "threshold" => Some(threshold()),
        _ => None,
    }
}

pub const NAMES: [&str; 3] = ["psq", "dualcap", "threshold"];

/// The shipped lawful handles: the four blocks, the constructed algebras
/// of a few representative specs, and a ladder window.
pub fn shipped() -> Vec<(String, AlgebraHandle)> {
    use crate::rational::{int, ratio};
    use crate::spec::{Component, EaterSpec, GapTag, LadderSpec};

    let mut out: Vec<(String, AlgebraHandle)> =
        BlockKind::ALL.iter().map(|k| (k.name().to_owned(), AlgebraHandle::Block(*k))).collect();
    let specs = [
        EaterSpec::trivial(),
        EaterSpec::points(&[int(0), ratio(1, 2)], &[GapTag::One]).unwrap(),
        EaterSpec::points(&[int(0), ratio(1, 2), int(1)], &[GapTag::One, GapTag::Infinity]).unwrap(),
        EaterSpec::new(
            vec![
                Component::Point(int(0)),
                Component::Interval(ratio(1, 4), ratio(1, 3)),
                Component::Point(ratio(3, 5)),
            ],
            vec![GapTag::Infinity, GapTag::One],
        )
        .unwrap(),
        EaterSpec::new(vec![Component::Interval(int(0), int(1))], vec![]).unwrap(),
    ];
    out.extend(specs.into_iter().map(|s| (format!("structured {s}"), AlgebraHandle::structured(s))));
    let ladder = LadderSpec::new(ratio(1, 16), GapTag::One, GapTag::Infinity, [(1, GapTag::One)]).unwrap();
    out.push(("ladder r=1/16 window -2..2".into(), AlgebraHandle::ladder(ladder, -2, 2).unwrap()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{Param, Point};

    #[test]
    fn fixture_values() {
        let h = Param::half();
        let (z, o) = (Point::zero(), Point::one());
        assert_eq!(psq().combine(&z, &o, &h).unwrap(), Point::exact(3, 4));
        assert_eq!(psq().combine(&o, &z, &h).unwrap(), Point::exact(1, 4));
        assert_eq!(dualcap().combine(&z, &Point::exact(1, 2), &h).unwrap(), z);
        assert_eq!(threshold().combine(&z, &Point::exact(1, 2), &h).unwrap(), Point::exact(1, 4));
        assert_eq!(threshold().combine(&z, &Point::exact(3, 4), &h).unwrap(), Point::exact(3, 4));
    }
}
