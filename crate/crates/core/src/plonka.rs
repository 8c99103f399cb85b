//! The algebra determined by an [`EaterSpec`], realised as a Plonka sum.
//!
//! The index set is `E` with its usual order. Each eater `a` owns the block
//! `X^(a)`: `[a,b)` when `(a,b)` is a gap, `[a,1]` when `a = max E < 1`, and
//! `{a}` otherwise. Inside a block the operations are the linear ones in a
//! local coordinate; across blocks the lower argument collapses to the base
//! of the higher block.
//!
//! Points are carried as [`SPoint`]s: the block base plus an exact rational
//! offset. Gap offsets live in `[0,1)` for tag `1` and in `[0,∞)` for tag
//! `∞`; top offsets live in `[0,1]`. The ambient embedding is affine in every
//! block except `∞`-gaps, which use `a + (b-a)(1 - e^(-t))`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::blocks::{exp_embed, exp_unembed};
use crate::error::{Error, Result};
use crate::point::Param;
use crate::rational::{self, Rational};
use crate::spec::{Component, EaterSpec, GapTag, Region};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Block {
    Singleton,
    Gap { a: Rational, b: Rational, tag: GapTag },
    Top { a: Rational },
}

/// Structured point: block base (an eater) plus a local coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SPoint {
    pub base: Rational,
    pub offset: Rational,
    pub block: Block,
}

impl SPoint {
    pub fn is_eater(&self) -> bool {
        self.offset.is_zero()
    }

    /// Ambient value; exact unless the point sits strictly inside an `∞`-gap.
    pub fn embed_exact(&self) -> Option<Rational> {
        match &self.block {
            Block::Singleton => Some(self.base.clone()),
            Block::Gap { a, b, tag: GapTag::One } => Some(a + (b - a) * &self.offset),
            Block::Gap { a, tag: GapTag::Infinity, .. } => self.offset.is_zero().then(|| a.clone()),
            Block::Top { a } => Some(a + (rational::one() - a) * &self.offset),
        }
    }

    /// Ambient value as a float.
    pub fn embed(&self) -> f64 {
        match &self.block {
            Block::Gap { a, b, tag: GapTag::Infinity } => {
                let a = rational::to_f64(a);
                let b = rational::to_f64(b);
                a + (b - a) * exp_embed(rational::to_f64(&self.offset))
            }
            _ => rational::to_f64(&self.embed_exact().expect("finite block embeds exactly")),
        }
    }

    /// Largest offset the block admits, `None` for the unbounded `∞`-gap scale.
    fn offset_cap(&self) -> Option<Rational> {
        match &self.block {
            Block::Singleton => Some(rational::zero()),
            Block::Gap { tag: GapTag::One, .. } | Block::Top { .. } => Some(rational::one()),
            Block::Gap { tag: GapTag::Infinity, .. } => None,
        }
    }
}

/// Lexicographic `(base, offset)`: the ambient order, since blocks are
/// ordered as wholes and each local embedding is increasing.
impl Ord for SPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.base.cmp(&other.base).then_with(|| self.offset.cmp(&other.offset))
    }
}

impl PartialOrd for SPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = rational::format(&self.offset);
        match &self.block {
            _ if self.offset.is_zero() => write!(f, "E:{}", rational::format(&self.base)),
            Block::Singleton => write!(f, "E:{}", rational::format(&self.base)),
            Block::Gap { a, b, .. } => {
                write!(f, "G:{}..{}@t={o}", rational::format(a), rational::format(b))
            }
            Block::Top { .. } => write!(f, "T@t={o}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocateMode {
    ExactOnly,
    AllowApprox,
}

/// Result of inverting the embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Located {
    pub point: SPoint,
    /// The offset is a float-derived approximation (`∞`-gaps only).
    pub approximate: bool,
}

/// The constructed algebra for one spec.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlonkaAlgebra {
    spec: EaterSpec,
}

/// Builds the Plonka-sum algebra realising `spec`.
pub fn build(spec: EaterSpec) -> PlonkaAlgebra {
    PlonkaAlgebra { spec }
}

impl PlonkaAlgebra {
    pub fn spec(&self) -> &EaterSpec {
        &self.spec
    }

    /// Block owned by the eater `e` (caller guarantees `e ∈ E`).
    fn block_of_eater(&self, e: &Rational) -> Block {
        let comps = self.spec.components();
        let i = match self.spec.region(e) {
            Region::Component(i) => i,
            _ => unreachable!("block_of_eater called with a non-eater"),
        };
        if e < comps[i].right() {
            return Block::Singleton;
        }
        if i + 1 < comps.len() {
            let gap = self.spec.gap(i);
            Block::Gap { a: gap.a, b: gap.b, tag: gap.tag }
        } else if self.spec.top_open() {
            Block::Top { a: e.clone() }
        } else {
            Block::Singleton
        }
    }

    pub fn eater(&self, e: &Rational) -> Result<SPoint> {
        if !self.spec.contains(e) {
            return Err(Error::Domain(format!("{} is not an eater", rational::display(e))));
        }
        Ok(SPoint { base: e.clone(), offset: rational::zero(), block: self.block_of_eater(e) })
    }

    pub fn zero(&self) -> SPoint {
        self.eater(&rational::zero()).expect("0 is an eater")
    }

    /// The point `1`.
    pub fn one(&self) -> SPoint {
        if self.spec.top_open() {
            SPoint {
                base: self.spec.max_eater().clone(),
                offset: rational::one(),
                block: self.block_of_eater(self.spec.max_eater()),
            }
        } else {
            self.eater(&rational::one()).expect("1 is an eater")
        }
    }

    /// Point of a gap block by local offset.
    pub fn gap_point(&self, gap_index: usize, offset: Rational) -> Result<SPoint> {
        if gap_index >= self.spec.gap_tags().len() {
            return Err(Error::Domain(format!("no gap with index {gap_index}")));
        }
        let gap = self.spec.gap(gap_index);
        let s = SPoint {
            base: gap.a.clone(),
            offset,
            block: Block::Gap { a: gap.a, b: gap.b, tag: gap.tag },
        };
        self.check(&s)?;
        Ok(s)
    }

    /// Point of the top block `[max E, 1]` by local offset.
    pub fn top_point(&self, offset: Rational) -> Result<SPoint> {
        if !self.spec.top_open() {
            return Err(Error::Domain("max E = 1: there is no top block".into()));
        }
        let a = self.spec.max_eater().clone();
        let s = SPoint { base: a.clone(), offset, block: Block::Top { a } };
        self.check(&s)?;
        Ok(s)
    }

    /// Verifies that `s` is a point of this algebra.
    pub fn check(&self, s: &SPoint) -> Result<()> {
        let foreign = || Error::Domain(format!("{s} is not a point of the algebra for {}", self.spec));
        if !self.spec.contains(&s.base) || self.block_of_eater(&s.base) != s.block {
            return Err(foreign());
        }
        if s.offset.is_negative() {
            return Err(foreign());
        }
        match &s.block {
            Block::Singleton if !s.offset.is_zero() => Err(foreign()),
            Block::Gap { tag: GapTag::One, .. } if s.offset >= rational::one() => Err(foreign()),
            Block::Top { .. } if s.offset > rational::one() => Err(foreign()),
            _ => Ok(()),
        }
    }

    /// Base of the block containing `s`, as an eater point.
    pub fn base_point(&self, s: &SPoint) -> SPoint {
        SPoint { base: s.base.clone(), offset: rational::zero(), block: s.block.clone() }
    }

    /// `x ⊕_p y`, exact.
    pub fn s_combine(&self, x: &SPoint, y: &SPoint, p: &Param) -> Result<SPoint> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.combine_unchecked(x, y, p))
    }

    pub(crate) fn combine_unchecked(&self, x: &SPoint, y: &SPoint, p: &Param) -> SPoint {
        if p.is_one() {
            return x.clone();
        }
        if p.is_zero() {
            return y.clone();
        }
        let p = p.value();
        let q = rational::one() - p;
        match x.base.cmp(&y.base) {
            Ordering::Equal => SPoint {
                base: x.base.clone(),
                offset: p * &x.offset + q * &y.offset,
                block: x.block.clone(),
            },
            // the lower argument maps to offset 0 of the higher block
            Ordering::Less => SPoint { base: y.base.clone(), offset: q * &y.offset, block: y.block.clone() },
            Ordering::Greater => SPoint { base: x.base.clone(), offset: p * &x.offset, block: x.block.clone() },
        }
    }

    /// Inverse embedding.
    pub fn locate(&self, x: &Rational, mode: LocateMode) -> Result<Located> {
        if !rational::in_unit(x) {
            return Err(Error::Domain(format!("{} is outside [0,1]", rational::display(x))));
        }
        let exact = |point| Ok(Located { point, approximate: false });
        match self.spec.region(x) {
            Region::Component(_) => exact(self.eater(x)?),
            Region::Gap(i) => {
                let gap = self.spec.gap(i);
                let u = (x - &gap.a) / (&gap.b - &gap.a);
                match gap.tag {
                    GapTag::One => exact(self.gap_point(i, u)?),
                    GapTag::Infinity => match mode {
                        LocateMode::ExactOnly => Err(Error::InexactCoordinate(x.clone())),
                        LocateMode::AllowApprox => {
                            let t = exp_unembed(rational::to_f64(&u));
                            let offset = rational::from_f64(t).ok_or_else(|| {
                                Error::Domain(format!("{} is too close to a gap end", rational::display(x)))
                            })?;
                            Ok(Located { point: self.gap_point(i, offset)?, approximate: true })
                        }
                    },
                }
            }
            Region::Top => {
                let a = self.spec.max_eater();
                exact(self.top_point((x - a) / (rational::one() - a))?)
            }
        }
    }

    /// Approximate inverse embedding of a float.
    pub fn locate_f64(&self, x: f64) -> Result<SPoint> {
        let q = rational::from_f64(x.clamp(0.0, 1.0))
            .ok_or_else(|| Error::Domain(format!("{x} is not finite")))?;
        Ok(self.locate(&q, LocateMode::AllowApprox)?.point)
    }

    /// Parses `E:p/q`, `G:a..b@t=p/q`, `T@t=p/q`, or an ambient rational.
    pub fn parse_point(&self, text: &str, mode: LocateMode) -> Result<Located> {
        let text = text.trim();
        let exact = |point| Ok(Located { point, approximate: false });
        if let Some(e) = text.strip_prefix("E:") {
            return exact(self.eater(&rational::parse(e)?)?);
        }
        if let Some(rest) = text.strip_prefix("G:") {
            let (range, t) = rest
                .split_once("@t=")
                .ok_or_else(|| Error::Parse(format!("expected G:a..b@t=p/q, got {text:?}")))?;
            let (a, b) = range
                .split_once("..")
                .ok_or_else(|| Error::Parse(format!("expected G:a..b@t=p/q, got {text:?}")))?;
            let (a, b) = (rational::parse(a)?, rational::parse(b)?);
            let i = self
                .spec
                .gaps()
                .iter()
                .position(|g| g.a == a && g.b == b)
                .ok_or_else(|| Error::Domain(format!("({a}, {b}) is not a gap")))?;
            return exact(self.gap_point(i, rational::parse(t)?)?);
        }
        if let Some(t) = text.strip_prefix("T@t=") {
            return exact(self.top_point(rational::parse(t)?)?);
        }
        self.locate(&rational::parse(text)?, mode)
    }

    /// A point strictly above `s` that tends to `s` as `k → ∞`; `None` at `1`.
    ///
    /// Within the block of `s` (or along the interval component for
    /// singletons) the step shrinks like `2^-k`.
    pub fn step_up(&self, s: &SPoint, k: u32) -> Option<SPoint> {
        let eps = rational::dyadic(k);
        match &s.block {
            Block::Singleton => {
                let comp = self.spec.components().iter().find(|c| c.contains(&s.base))?;
                match comp {
                    Component::Interval(_, d) if &s.base < d => {
                        let base = &s.base + (d - &s.base) * eps;
                        Some(self.eater(&base).expect("inside the component"))
                    }
                    _ => None,
                }
            }
            _ => {
                let offset = match s.offset_cap() {
                    Some(cap) if s.offset >= cap => return None,
                    Some(cap) => &s.offset + (cap - &s.offset) * eps,
                    None => &s.offset + eps,
                };
                Some(SPoint { offset, ..s.clone() })
            }
        }
    }

    /// Closed-form `V_{x,y}` for `x ≤ y`: `x` when both share a block,
    /// otherwise the base of `y`'s block.
    pub fn v_value(&self, x: &SPoint, y: &SPoint) -> Result<SPoint> {
        self.check(x)?;
        self.check(y)?;
        if x > y {
            return Err(Error::Precondition(format!("V needs x ≤ y, got {x} > {y}")));
        }
        if x.base == y.base {
            Ok(x.clone())
        } else {
            Ok(self.base_point(y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn half_one() -> PlonkaAlgebra {
        build(EaterSpec::points(&[int(0), ratio(1, 2)], &[GapTag::One]).unwrap())
    }

    fn exp_like() -> PlonkaAlgebra {
        build(EaterSpec::points(&[int(0), int(1)], &[GapTag::Infinity]).unwrap())
    }

    #[test]
    fn combine_across_blocks() {
        let alg = half_one();
        let x = alg.locate(&ratio(1, 4), LocateMode::ExactOnly).unwrap().point;
        let y = alg.locate(&ratio(3, 4), LocateMode::ExactOnly).unwrap().point;
        assert_eq!(x.offset, ratio(1, 2));
        assert_eq!(y.offset, ratio(1, 2));
        let z = alg.s_combine(&x, &y, &Param::half()).unwrap();
        assert_eq!(z, alg.top_point(ratio(1, 4)).unwrap());
        assert_eq!(z.embed_exact(), Some(ratio(5, 8)));
    }

    #[test]
    fn eaters_combine_to_max() {
        let alg = half_one();
        let z = alg.s_combine(&alg.zero(), &alg.eater(&ratio(1, 2)).unwrap(), &Param::ratio(1, 3)).unwrap();
        assert_eq!(z.embed_exact(), Some(ratio(1, 2)));
        assert!(z.is_eater());
    }

    #[test]
    fn infinity_gap_offsets_average() {
        let alg = exp_like();
        let x = alg.gap_point(0, int(1)).unwrap();
        let y = alg.gap_point(0, int(0)).unwrap();
        let z = alg.s_combine(&x, &y, &Param::half()).unwrap();
        assert_eq!(z.offset, ratio(1, 2));
        assert!((z.embed() - 0.393_469_340_287_366_6).abs() < 1e-12);
        // agrees with the closed-form exponential block on ambient values
        let direct = 1.0 - (1.0 - x.embed()).powf(0.5) * (1.0 - y.embed()).powf(0.5);
        assert!((z.embed() - direct).abs() < 1e-12);
    }

    #[test]
    fn embed_examples() {
        assert_eq!(exp_like().gap_point(0, int(0)).unwrap().embed(), 0.0);
        assert!((exp_like().gap_point(0, int(1)).unwrap().embed() - 0.632_120_558_828_557_7).abs() < 1e-12);
        let alg = build(
            EaterSpec::points(&[int(0), ratio(1, 4), ratio(1, 2)], &[GapTag::One, GapTag::One]).unwrap(),
        );
        assert_eq!(alg.gap_point(1, ratio(1, 2)).unwrap().embed_exact(), Some(ratio(3, 8)));
    }

    #[test]
    fn locate_examples() {
        let alg = half_one();
        let s = alg.locate(&ratio(1, 4), LocateMode::ExactOnly).unwrap();
        assert_eq!(s.point, alg.gap_point(0, ratio(1, 2)).unwrap());
        assert!(!s.approximate);
        assert!(alg.locate(&ratio(1, 2), LocateMode::ExactOnly).unwrap().point.is_eater());
        let e = exp_like();
        assert!(matches!(e.locate(&ratio(1, 2), LocateMode::ExactOnly), Err(Error::InexactCoordinate(_))));
        let l = e.locate(&ratio(1, 2), LocateMode::AllowApprox).unwrap();
        assert!(l.approximate);
        assert!((rational::to_f64(&l.point.offset) - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn text_forms() {
        let alg = half_one();
        for text in ["E:0/1", "G:0/1..1/2@t=1/3", "T@t=1/5", "E:1/2"] {
            let p = alg.parse_point(text, LocateMode::ExactOnly).unwrap().point;
            assert_eq!(p.to_string(), text);
        }
        assert_eq!(alg.one().to_string(), "T@t=1/1");
        assert!(alg.parse_point("G:0/1..1/3@t=1/3", LocateMode::ExactOnly).is_err());
        assert!(alg.parse_point("E:1/3", LocateMode::ExactOnly).is_err());
        assert!(alg.parse_point("G:0/1..1/2@t=1/1", LocateMode::ExactOnly).is_err());
    }

    #[test]
    fn foreign_points_rejected() {
        let alg = half_one();
        let other = exp_like();
        let foreign = other.gap_point(0, int(3)).unwrap();
        assert!(alg.s_combine(&foreign, &alg.zero(), &Param::half()).is_err());
    }

    #[test]
    fn interval_components_are_singletons() {
        let alg = build(
            EaterSpec::new(
                vec![Component::Interval(int(0), ratio(1, 2))],
                vec![],
            )
            .unwrap(),
        );
        let a = alg.eater(&ratio(1, 4)).unwrap();
        assert_eq!(a.block, Block::Singleton);
        assert_eq!(alg.eater(&ratio(1, 2)).unwrap().block, Block::Top { a: ratio(1, 2) });
        let up = alg.step_up(&a, 1).unwrap();
        assert_eq!(up.base, ratio(3, 8));
        assert!(alg.step_up(&alg.one(), 3).is_none());
    }
}
