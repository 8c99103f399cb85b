//! The classification data of an algebra: a closed eater set `E ⊆ [0,1]`
//! with `0 ∈ E`, given as finitely many points and closed intervals, plus a
//! [`GapTag`] for every bounded gap between consecutive components.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SpecViolation};
use crate::rational::{self, Rational};

/// Endpoint constant of a gap: the gap `[a,b)` is isomorphic to `[0,1)` or
/// to `[0,∞)` with the linear operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GapTag {
    One,
    Infinity,
}

impl GapTag {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(GapTag::One),
            "inf" | "infinity" | "∞" => Ok(GapTag::Infinity),
            other => Err(Error::Parse(format!("sigma must be \"1\" or \"inf\", got {other:?}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GapTag::One => "1",
            GapTag::Infinity => "inf",
        }
    }
}

impl fmt::Display for GapTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Component {
    Point(Rational),
    Interval(Rational, Rational),
}

impl Component {
    pub fn left(&self) -> &Rational {
        match self {
            Component::Point(a) | Component::Interval(a, _) => a,
        }
    }

    pub fn right(&self) -> &Rational {
        match self {
            Component::Point(a) | Component::Interval(_, a) => a,
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.left() <= x && x <= self.right()
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Component::Interval(..))
    }
}

/// A bounded gap `(a, b)` of `E` with its tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gap {
    pub a: Rational,
    pub b: Rational,
    pub tag: GapTag,
}

/// Unvalidated input, e.g. straight from a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSpec {
    pub components: Vec<Component>,
    pub gap_tags: Vec<GapTag>,
}

/// A validated data set `⟦E, (σ_gap)⟧`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EaterSpec {
    components: Vec<Component>,
    gap_tags: Vec<GapTag>,
}

/// Checks every invariant and reports the first violation.
pub fn validate_spec(raw: RawSpec) -> Result<EaterSpec, SpecViolation> {
    let RawSpec { components, gap_tags } = raw;
    if components.is_empty() {
        return Err(SpecViolation::Empty);
    }
    for (index, c) in components.iter().enumerate() {
        if !rational::in_unit(c.left()) || !rational::in_unit(c.right()) {
            return Err(SpecViolation::OutOfRange { index });
        }
        if let Component::Interval(a, b) = c {
            if a >= b {
                return Err(SpecViolation::MalformedInterval { index });
            }
        }
    }
    if !components[0].left().is_zero() {
        return Err(SpecViolation::MissingZero);
    }
    for (index, pair) in components.windows(2).enumerate() {
        if pair[0].right() >= pair[1].left() {
            return Err(SpecViolation::Overlap { index, next: index + 1 });
        }
    }
    if gap_tags.len() != components.len() - 1 {
        return Err(SpecViolation::GapCountMismatch {
            expected: components.len() - 1,
            found: gap_tags.len(),
        });
    }
    Ok(EaterSpec { components, gap_tags })
}

/// Where an ambient point sits relative to `E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Inside component `i`.
    Component(usize),
    /// Strictly inside gap `i` (between components `i` and `i+1`).
    Gap(usize),
    /// Strictly above `max E`.
    Top,
}

impl EaterSpec {
    pub fn new(components: Vec<Component>, gap_tags: Vec<GapTag>) -> Result<Self, SpecViolation> {
        validate_spec(RawSpec { components, gap_tags })
    }

    /// `E = {0}`.
    pub fn trivial() -> Self {
        EaterSpec { components: vec![Component::Point(rational::zero())], gap_tags: vec![] }
    }

    /// `E = {e_0 = 0 < e_1 < … }` of isolated points with the given tags.
    pub fn points(eaters: &[Rational], tags: &[GapTag]) -> Result<Self, SpecViolation> {
        Self::new(eaters.iter().cloned().map(Component::Point).collect(), tags.to_vec())
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn gap_tags(&self) -> &[GapTag] {
        &self.gap_tags
    }

    pub fn into_raw(self) -> RawSpec {
        RawSpec { components: self.components, gap_tags: self.gap_tags }
    }

    pub fn max_eater(&self) -> &Rational {
        self.components.last().expect("validated spec is non-empty").right()
    }

    /// `max E < 1`, i.e. there is a linear top block `[max E, 1]` of positive length.
    pub fn top_open(&self) -> bool {
        !self.max_eater().is_one()
    }

    pub fn gap(&self, i: usize) -> Gap {
        Gap {
            a: self.components[i].right().clone(),
            b: self.components[i + 1].left().clone(),
            tag: self.gap_tags[i],
        }
    }

    /// All bounded gaps in increasing order.
    pub fn gaps(&self) -> Vec<Gap> {
        (0..self.gap_tags.len()).map(|i| self.gap(i)).collect()
    }

    /// Index of the last component whose left end is `≤ x` (exists for `x ≥ 0`).
    fn component_below(&self, x: &Rational) -> usize {
        self.components.partition_point(|c| c.left() <= x).saturating_sub(1)
    }

    pub fn region(&self, x: &Rational) -> Region {
        let i = self.component_below(x);
        if self.components[i].contains(x) {
            Region::Component(i)
        } else if i + 1 < self.components.len() {
            Region::Gap(i)
        } else {
            Region::Top
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        matches!(self.region(x), Region::Component(_))
    }

    /// `max(E ∩ [0,x])`.
    pub fn alpha(&self, x: &Rational) -> Rational {
        let c = &self.components[self.component_below(x)];
        if c.contains(x) {
            x.clone()
        } else {
            c.right().clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecRepr::from(self)).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: SpecRepr = serde_json::from_str(text)?;
        Ok(validate_spec(repr.try_into()?)?)
    }
}

impl fmt::Display for EaterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E = ")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                write!(f, " ∪ ")?;
            }
            match c {
                Component::Point(a) => write!(f, "{{{}}}", rational::display(a))?,
                Component::Interval(a, b) => {
                    write!(f, "[{}, {}]", rational::display(a), rational::display(b))?
                }
            }
        }
        write!(f, "; σ = (")?;
        for (i, t) in self.gap_tags.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum ComponentRepr {
    Point(String),
    Interval([String; 2]),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GapRepr {
    sigma: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRepr {
    components: Vec<ComponentRepr>,
    gaps: Vec<GapRepr>,
}

impl From<&EaterSpec> for SpecRepr {
    fn from(spec: &EaterSpec) -> Self {
        SpecRepr {
            components: spec
                .components
                .iter()
                .map(|c| match c {
                    Component::Point(a) => ComponentRepr::Point(rational::format(a)),
                    Component::Interval(a, b) => {
                        ComponentRepr::Interval([rational::format(a), rational::format(b)])
                    }
                })
                .collect(),
            gaps: spec.gap_tags.iter().map(|t| GapRepr { sigma: t.as_str().to_owned() }).collect(),
        }
    }
}

impl TryFrom<SpecRepr> for RawSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        let components = repr
            .components
            .iter()
            .map(|c| match c {
                ComponentRepr::Point(a) => Ok(Component::Point(rational::parse(a)?)),
                ComponentRepr::Interval([a, b]) => {
                    Ok(Component::Interval(rational::parse(a)?, rational::parse(b)?))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let gap_tags = repr.gaps.iter().map(|g| GapTag::parse(&g.sigma)).collect::<Result<_>>()?;
        Ok(RawSpec { components, gap_tags })
    }
}

/// Parses a spec file without validating it.
pub fn parse_raw(text: &str) -> Result<RawSpec> {
    let repr: SpecRepr = serde_json::from_str(text)?;
    repr.try_into()
}

/// The ladder family `E = {r^(2^n) : n ∈ ℤ} ∪ {0,1}` with gap `n` equal to
/// `(r^(2^n), r^(2^(n-1)))`.
///
/// `σ_n` is `exceptions[n]` when present, otherwise `left` for `n < 0` and
/// `right` for `n ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderSpec {
    pub r: Rational,
    pub left: GapTag,
    pub right: GapTag,
    pub exceptions: BTreeMap<i64, GapTag>,
}

/// Largest bit size a ladder eater may have before the window is refused.
pub const LADDER_BIT_BUDGET: u64 = 1 << 16;

impl LadderSpec {
    pub fn new(
        r: Rational,
        left: GapTag,
        right: GapTag,
        exceptions: impl IntoIterator<Item = (i64, GapTag)>,
    ) -> Result<Self> {
        if !r.is_positive() || r >= rational::one() {
            return Err(Error::Ladder(format!("ratio must lie in (0,1), got {}", rational::display(&r))));
        }
        let mut map = BTreeMap::new();
        for (n, tag) in exceptions {
            if map.insert(n, tag).is_some() {
                return Err(Error::Ladder(format!("duplicate exception index {n}")));
            }
        }
        Ok(LadderSpec { r, left, right, exceptions: map })
    }

    /// Constant sequence `σ ≡ tag`.
    pub fn constant(r: Rational, tag: GapTag) -> Self {
        LadderSpec { r, left: tag, right: tag, exceptions: BTreeMap::new() }
    }

    pub fn sigma(&self, n: i64) -> GapTag {
        match self.exceptions.get(&n) {
            Some(&t) => t,
            None if n < 0 => self.left,
            None => self.right,
        }
    }

    /// The eater `r^(2^n)`, exact when rational.
    pub fn eater(&self, n: i64) -> Result<Rational> {
        if n >= 0 {
            let k = u32::try_from(n).map_err(|_| Error::Ladder(format!("index {n} too large")))?;
            let bits = rational::bit_size(&self.r);
            if k >= 40 || bits.saturating_mul(1u64 << k) > LADDER_BIT_BUDGET {
                return Err(Error::Ladder(format!(
                    "r^(2^{n}) exceeds the exponent budget of {LADDER_BIT_BUDGET} bits"
                )));
            }
            Ok(rational::pow_pow2(&self.r, k))
        } else {
            let k = u32::try_from(-n).unwrap_or(u32::MAX).min(64);
            rational::root_pow2(&self.r, k).ok_or_else(|| {
                Error::Ladder(format!(
                    "r^(2^{n}) is irrational for r = {}",
                    rational::display(&self.r)
                ))
            })
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&LadderFile { ladder: LadderRepr::from(self) })
            .expect("ladder serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LadderFile = serde_json::from_str(text)?;
        file.ladder.try_into()
    }
}

/// Finite window of a ladder: eaters `{0} ∪ {r^(2^n) : lo ≤ n ≤ hi} ∪ {1}`.
///
/// Gap `n` for `lo < n ≤ hi` carries `σ_n`; the two boundary gaps touching
/// `0` and `1` are tagged [`GapTag::One`].
pub fn ladder_to_window(spec: &LadderSpec, n_lo: i64, n_hi: i64) -> Result<EaterSpec> {
    if n_lo >= n_hi {
        return Err(Error::Ladder(format!("empty window {n_lo}..{n_hi}")));
    }
    let mut components = vec![Component::Point(rational::zero())];
    let mut tags = vec![GapTag::One];
    for n in (n_lo..=n_hi).rev() {
        components.push(Component::Point(spec.eater(n)?));
        if n < n_hi {
            tags.push(spec.sigma(n + 1));
        }
    }
    components.push(Component::Point(rational::one()));
    tags.push(GapTag::One);
    Ok(EaterSpec::new(components, tags)?)
}

/// Index `n` of the ladder gap at position `i` of a window spec, if interior.
pub fn window_gap_index(n_lo: i64, n_hi: i64, i: usize) -> Option<i64> {
    let n = n_hi - i as i64 + 1;
    (i >= 1 && n > n_lo && n <= n_hi).then_some(n)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExceptionRepr {
    n: i64,
    sigma: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderRepr {
    r: String,
    left: String,
    right: String,
    #[serde(default)]
    exceptions: Vec<ExceptionRepr>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderFile {
    ladder: LadderRepr,
}

impl From<&LadderSpec> for LadderRepr {
    fn from(l: &LadderSpec) -> Self {
        LadderRepr {
            r: rational::format(&l.r),
            left: l.left.as_str().into(),
            right: l.right.as_str().into(),
            exceptions: l
                .exceptions
                .iter()
                .map(|(&n, t)| ExceptionRepr { n, sigma: t.as_str().into() })
                .collect(),
        }
    }
}

impl TryFrom<LadderRepr> for LadderSpec {
    type Error = Error;

    fn try_from(repr: LadderRepr) -> Result<Self> {
        let exceptions = repr
            .exceptions
            .iter()
            .map(|e| Ok((e.n, GapTag::parse(&e.sigma)?)))
            .collect::<Result<Vec<_>>>()?;
        LadderSpec::new(
            rational::parse(&repr.r)?,
            GapTag::parse(&repr.left)?,
            GapTag::parse(&repr.right)?,
            exceptions,
        )
    }
}

/// Either kind of file the tools read.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFile {
    Eater(EaterSpec),
    Ladder(LadderSpec),
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("ladder").is_some() {
            Ok(SpecFile::Ladder(LadderSpec::from_json(text)?))
        } else {
            Ok(SpecFile::Eater(EaterSpec::from_json(text)?))
        }
    }
}
