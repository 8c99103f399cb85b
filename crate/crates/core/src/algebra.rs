//! Uniform interface over every algebra source: constructed (exact
//! structured points), ladder windows, the closed-form blocks, exact
//! black-box fixtures and float black boxes.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_traits::Signed;

use crate::blocks::{block_combine, exp_embed, exp_unembed, BlockKind};
use crate::error::{Error, Result};
use crate::plonka::{build, Block, LocateMode, PlonkaAlgebra, SPoint};
use crate::point::{Param, Point};
use crate::rational::{self, Rational};
use crate::spec::{ladder_to_window, EaterSpec, LadderSpec};

/// Equality tolerance for float handles.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Depth of dyadic monotone-limit probes.
pub const DEFAULT_DEPTH: u32 = 40;

pub type NumericFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// A black-box float operation `(x, y, p) ↦ x ⊕_p y` for `p ∈ (0,1)`.
#[derive(Clone)]
pub struct NumericOp {
    name: String,
    f: Arc<NumericFn>,
    tol: f64,
}

impl NumericOp {
    pub fn new(name: impl Into<String>, tol: f64, f: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        assert!(tol > 0.0, "numeric tolerance must be positive");
        NumericOp { name: name.into(), f: Arc::new(f), tol }
    }

    /// Float rendition of one of the closed-form blocks.
    pub fn from_block(kind: BlockKind) -> Self {
        let f = move |x: f64, y: f64, p: f64| -> f64 {
            match kind {
                BlockKind::Linear => p * x + (1.0 - p) * y,
                BlockKind::Max => x.max(y),
                BlockKind::Cap if x == 1.0 || y == 1.0 => 1.0,
                BlockKind::Cap => p * x + (1.0 - p) * y,
                BlockKind::Exp => exp_embed(p * exp_unembed(x) + (1.0 - p) * exp_unembed(y)),
            }
        };
        NumericOp::new(format!("numeric:{kind}"), DEFAULT_TOL, f)
    }

    /// Hides a constructed algebra behind its ambient float embedding.
    pub fn probe(spec: EaterSpec) -> Self {
        let alg = build(spec);
        NumericOp::new("probe", DEFAULT_TOL, move |x, y, p| {
            let (Ok(xs), Ok(ys), Some(p)) = (alg.locate_f64(x), alg.locate_f64(y), rational::from_f64(p)) else {
                return f64::NAN;
            };
            let p = Param::new(p).expect("p in [0,1]");
            alg.s_combine(&xs, &ys, &p).map(|s| s.embed()).unwrap_or(f64::NAN)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn call(&self, x: f64, y: f64, p: f64) -> f64 {
        (self.f)(x, y, p)
    }
}

impl fmt::Debug for NumericOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumericOp").field("name", &self.name).field("tol", &self.tol).finish()
    }
}

/// An exact black-box operation on rationals, used for negative controls.
#[derive(Clone, Copy)]
pub struct ExactOp {
    pub name: &'static str,
    pub f: fn(&Rational, &Rational, &Rational) -> Rational,
}

impl fmt::Debug for ExactOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactOp").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum AlgebraHandle {
    Structured(PlonkaAlgebra),
    Ladder { spec: LadderSpec, window: (i64, i64), algebra: PlonkaAlgebra },
    Block(BlockKind),
    Exact(ExactOp),
    Numeric(NumericOp),
}

/// Kernel of the path `Γ_{x,y}`, one of the five congruences of the unit
/// interval with linear operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelClass {
    /// Injective path.
    Diagonal,
    /// `(0,1)` collapsed, endpoints separate.
    MiddleCollapsed,
    /// `[0,1)` collapsed.
    LeftCollapsed,
    /// `(0,1]` collapsed.
    RightCollapsed,
    /// Constant path.
    Universal,
}

/// Finitely supported distribution of points with exact weights summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PointDist {
    entries: Vec<(Point, Rational)>,
}

impl PointDist {
    pub fn new(entries: Vec<(Point, Rational)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Domain("empty distribution".into()));
        }
        if let Some((_, w)) = entries.iter().find(|(_, w)| !w.is_positive()) {
            return Err(Error::Domain(format!("weight {} is not positive", rational::display(w))));
        }
        let total: Rational = entries.iter().map(|(_, w)| w).sum();
        if total != rational::one() {
            return Err(Error::Domain(format!("weights sum to {}, not 1", rational::display(&total))));
        }
        Ok(PointDist { entries })
    }

    pub fn point_mass(x: Point) -> Self {
        PointDist { entries: vec![(x, rational::one())] }
    }

    pub fn entries(&self) -> &[(Point, Rational)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.entries.len() {
            return Err(Error::Precondition(format!("index {j} out of range")));
        }
        Ok(())
    }
}

impl AlgebraHandle {
    pub fn structured(spec: EaterSpec) -> Self {
        AlgebraHandle::Structured(build(spec))
    }

    pub fn ladder(spec: LadderSpec, lo: i64, hi: i64) -> Result<Self> {
        let algebra = build(ladder_to_window(&spec, lo, hi)?);
        Ok(AlgebraHandle::Ladder { spec, window: (lo, hi), algebra })
    }

    pub fn name(&self) -> String {
        match self {
            AlgebraHandle::Structured(a) => format!("structured[{}]", a.spec()),
            AlgebraHandle::Ladder { spec, window, .. } => format!(
                "ladder[r={}, window {}..{}]",
                rational::display(&spec.r),
                window.0,
                window.1
            ),
            AlgebraHandle::Block(k) => k.name().to_owned(),
            AlgebraHandle::Exact(op) => format!("fixture:{}", op.name),
            AlgebraHandle::Numeric(op) => op.name().to_owned(),
        }
    }

    /// The constructed algebra behind structured and ladder handles.
    pub fn plonka(&self) -> Option<&PlonkaAlgebra> {
        match self {
            AlgebraHandle::Structured(a) | AlgebraHandle::Ladder { algebra: a, .. } => Some(a),
            _ => None,
        }
    }

    /// Whether results are compared with exact equality.
    pub fn is_exact(&self) -> bool {
        match self {
            AlgebraHandle::Block(k) => k.is_exact(),
            AlgebraHandle::Numeric(_) => false,
            _ => true,
        }
    }

    /// Equality tolerance; `0` for exact handles.
    pub fn tol(&self) -> f64 {
        match self {
            AlgebraHandle::Numeric(op) => op.tol(),
            _ if self.is_exact() => 0.0,
            _ => DEFAULT_TOL,
        }
    }

    pub fn zero(&self) -> Point {
        match self {
            AlgebraHandle::Numeric(_) => Point::Float(0.0),
            _ => match self.plonka() {
                Some(a) => a.zero().into(),
                None => Point::zero(),
            },
        }
    }

    pub fn one(&self) -> Point {
        match self {
            AlgebraHandle::Numeric(_) => Point::Float(1.0),
            _ => match self.plonka() {
                Some(a) => a.one().into(),
                None => Point::one(),
            },
        }
    }

    /// The handle's point at ambient position `q`.
    pub fn point(&self, q: &Rational, mode: LocateMode) -> Result<Point> {
        match self {
            AlgebraHandle::Numeric(_) => {
                let p = Point::Float(rational::to_f64(q));
                p.check_unit()?;
                Ok(p)
            }
            _ => match self.plonka() {
                Some(a) => Ok(a.locate(q, mode)?.point.into()),
                None => {
                    let p = Point::Exact(q.clone());
                    p.check_unit()?;
                    Ok(p)
                }
            },
        }
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        match (self.plonka(), x) {
            (Some(a), Point::Structured(s)) => a.check(s),
            (Some(_), _) => Err(Error::Domain(format!("{x} is not a structured point"))),
            (None, Point::Structured(_)) => {
                Err(Error::Domain(format!("{x} is a structured point of another algebra")))
            }
            (None, _) => {
                if matches!(self, AlgebraHandle::Exact(_)) && !x.is_exact() {
                    return Err(Error::Domain(format!("{x} is not exact")));
                }
                x.check_unit()
            }
        }
    }

    /// `x ⊕_p y`.
    pub fn combine(&self, x: &Point, y: &Point, p: &Param) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        if p.is_one() {
            return Ok(x.clone());
        }
        if p.is_zero() {
            return Ok(y.clone());
        }
        match self {
            AlgebraHandle::Structured(a) | AlgebraHandle::Ladder { algebra: a, .. } => {
                let (Point::Structured(xs), Point::Structured(ys)) = (x, y) else { unreachable!() };
                Ok(Point::Structured(a.combine_unchecked(xs, ys, p)))
            }
            AlgebraHandle::Block(kind) => block_combine(*kind, x, y, p),
            AlgebraHandle::Exact(op) => {
                let (Point::Exact(a), Point::Exact(b)) = (x, y) else { unreachable!() };
                let r = Point::Exact((op.f)(a, b, p.value()));
                r.check_unit()?;
                Ok(r)
            }
            AlgebraHandle::Numeric(op) => {
                let r = Point::Float(op.call(x.to_f64(), y.to_f64(), p.to_f64()));
                r.check_unit()?;
                Ok(r)
            }
        }
    }

    /// Point equality under the handle's policy.
    pub fn eq(&self, a: &Point, b: &Point) -> bool {
        match (a, b) {
            (Point::Exact(x), Point::Exact(y)) if self.is_exact() => x == y,
            (Point::Structured(x), Point::Structured(y)) => x == y,
            _ => (a.to_f64() - b.to_f64()).abs() <= self.tol(),
        }
    }

    pub fn cmp(&self, a: &Point, b: &Point) -> Ordering {
        a.ambient_cmp(b)
    }

    /// `a ≤ b`, up to the tolerance for float handles.
    pub fn le(&self, a: &Point, b: &Point) -> bool {
        self.cmp(a, b).is_le() || self.eq(a, b)
    }

    pub fn max(&self, a: &Point, b: &Point) -> Point {
        if self.cmp(a, b).is_ge() {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// `Γ_{x,y}(t) = y ⊕_t x`.
    pub fn gamma(&self, x: &Point, y: &Point, t: &Param) -> Result<Point> {
        self.combine(y, x, t)
    }

    /// `⨁ p_i x_i`, folding from the left with renormalised tails.
    pub fn barycenter(&self, d: &PointDist) -> Result<Point> {
        let entries = d.entries();
        let (last, _) = entries.last().expect("non-empty");
        self.check_point(last)?;
        let mut acc = last.clone();
        let mut mass = entries.last().unwrap().1.clone();
        for (x, w) in entries.iter().rev().skip(1) {
            mass += w;
            acc = self.combine(x, &acc, &Param::new(w / &mass)?)?;
        }
        Ok(acc)
    }

    pub fn kernel_class(&self, x: &Point, y: &Point) -> Result<KernelClass> {
        let g = |t: Param| self.gamma(x, y, &t);
        let c_mid = self.eq(&g(Param::ratio(1, 3))?, &g(Param::ratio(2, 3))?);
        if !c_mid {
            return Ok(KernelClass::Diagonal);
        }
        let mid = g(Param::half())?;
        let c_left = self.eq(&g(Param::zero())?, &mid);
        let c_right = self.eq(&mid, &g(Param::one())?);
        Ok(match (c_left, c_right) {
            (true, true) => KernelClass::Universal,
            (true, false) => KernelClass::LeftCollapsed,
            (false, true) => KernelClass::RightCollapsed,
            (false, false) => KernelClass::MiddleCollapsed,
        })
    }

    /// `y ⊳ x`, decided by the single probe `y ⊕_{1/2} x = y`.
    pub fn eats(&self, y: &Point, x: &Point) -> Result<bool> {
        Ok(self.eq(&self.combine(y, x, &Param::half())?, y))
    }

    /// `V_{x,y} = inf_{p ∈ (0,1]} y ⊕_p x` for `x ≤ y`.
    pub fn v_value(&self, x: &Point, y: &Point) -> Result<Point> {
        self.v_value_depth(x, y, DEFAULT_DEPTH)
    }

    pub fn v_value_depth(&self, x: &Point, y: &Point, depth: u32) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        if self.cmp(x, y).is_gt() && !self.eq(x, y) {
            return Err(Error::Precondition(format!("V needs x ≤ y, got {x} > {y}")));
        }
        if let (Some(a), Point::Structured(xs), Point::Structured(ys)) = (self.plonka(), x, y) {
            return Ok(a.v_value(xs, ys)?.into());
        }
        let seq = (1..=depth)
            .map(|k| self.combine(y, x, &Param::new(rational::dyadic(k))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(monotone_limit(self, &seq))
    }

    /// Replaces every `x_i` eaten by `x_j` with `x_j`.
    pub fn rewrite_eaters(&self, d: &PointDist, j: usize) -> Result<PointDist> {
        d.check_index(j)?;
        let xj = &d.entries()[j].0;
        let entries = d
            .entries()
            .iter()
            .map(|(x, w)| Ok((if self.eats(xj, x)? { xj.clone() } else { x.clone() }, w.clone())))
            .collect::<Result<Vec<_>>>()?;
        PointDist::new(entries)
    }

    /// Barycenter after clamping every point from below at `V_{0,x_j}`.
    pub fn clamp_barycenter(&self, d: &PointDist, j: usize) -> Result<Point> {
        d.check_index(j)?;
        let v = self.v_value(&self.zero(), &d.entries()[j].0)?;
        let entries = d.entries().iter().map(|(x, w)| (self.max(x, &v), w.clone())).collect();
        self.barycenter(&PointDist::new(entries)?)
    }
}

/// Exact limit of `s_k` as `k → ∞` when the tail is a polynomial of low
/// degree in `h_k = 2^-k`.
///
/// Runs a Richardson tableau over the last five terms; column `m` is constant
/// exactly when the tail is a polynomial of degree `≤ m` in `h_k`, and then
/// equals the limit. Returns `None` when no column up to degree 3 settles.
pub fn richardson(seq: &[Rational]) -> Option<Rational> {
    const TERMS: usize = 5;
    let tail = &seq[seq.len().saturating_sub(TERMS)..];
    if tail.len() < 2 {
        return None;
    }
    let mut col: Vec<Rational> = tail.to_vec();
    let mut factor = rational::int(1);
    loop {
        if col.windows(2).all(|w| w[0] == w[1]) {
            return col.pop();
        }
        if col.len() <= 2 {
            return None;
        }
        factor *= rational::int(2);
        let denom = &factor - rational::int(1);
        col = col.windows(2).map(|w| (&factor * &w[1] - &w[0]) / &denom).collect();
    }
}

/// Extrapolated limit of a probe sequence indexed by `2^-k`, for exact
/// handles whose tail is certified polynomial by [`richardson`].
pub fn extrapolate(alg: &AlgebraHandle, seq: &[Point]) -> Option<Point> {
    if !alg.is_exact() || seq.len() < 2 {
        return None;
    }
    let tail = &seq[seq.len().saturating_sub(5)..];
    if let Some(vals) = tail.iter().map(|p| p.as_exact().cloned()).collect::<Option<Vec<_>>>() {
        return richardson(&vals).map(Point::Exact);
    }
    let tail = tail.iter().map(|p| p.as_structured()).collect::<Option<Vec<_>>>()?;
    let plonka = alg.plonka()?;
    let last = tail.last()?;
    if tail.iter().all(|s| s.base == last.base) {
        let offsets: Vec<_> = tail.iter().map(|s| s.offset.clone()).collect();
        let offset = richardson(&offsets)?;
        let s = SPoint { offset, ..(*last).clone() };
        plonka.check(&s).ok()?;
        return Some(Point::Structured(s));
    }
    if tail.iter().all(|s| s.block == Block::Singleton) {
        let bases: Vec<_> = tail.iter().map(|s| s.base.clone()).collect();
        return plonka.eater(&richardson(&bases)?).ok().map(Point::Structured);
    }
    None
}

/// Limit of a monotone probe sequence: extrapolated when certified,
/// otherwise the last term (a one-sided bound).
pub fn monotone_limit(alg: &AlgebraHandle, seq: &[Point]) -> Point {
    extrapolate(alg, seq).unwrap_or_else(|| seq.last().expect("non-empty probe sequence").clone())
}

/// Lower limit of a probe sequence: extrapolated when certified, otherwise
/// the least of the last three terms.
pub fn liminf_estimate(alg: &AlgebraHandle, seq: &[Point]) -> Point {
    extrapolate(alg, seq).unwrap_or_else(|| {
        seq[seq.len().saturating_sub(3)..]
            .iter()
            .min_by(|a, b| alg.cmp(a, b))
            .expect("non-empty probe sequence")
            .clone()
    })
}

impl fmt::Display for KernelClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Shorthand used across tests and the CLI.
pub fn exact(q: Rational) -> Point {
    Point::Exact(q)
}
