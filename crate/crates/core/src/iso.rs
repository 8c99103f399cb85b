//! Isomorphy of constructed algebras: signatures, the piecewise
//! isomorphism, ladder shifts and automorphism groups.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::plonka::{build, SPoint};
use crate::rational::{self, Rational};
use crate::spec::{Component, EaterSpec, GapTag, LadderSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Pt,
    Iv,
}

/// Everything an increasing bijection of eater sets must preserve.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonSig {
    pub component_kinds: Vec<ComponentKind>,
    pub gap_tags: Vec<GapTag>,
    pub top_open: bool,
}

pub fn canonical_signature(spec: &EaterSpec) -> CanonSig {
    CanonSig {
        component_kinds: spec
            .components()
            .iter()
            .map(|c| if c.is_interval() { ComponentKind::Iv } else { ComponentKind::Pt })
            .collect(),
        gap_tags: spec.gap_tags().to_vec(),
        top_open: spec.top_open(),
    }
}

/// One item of the interleaved sequence `kind₀, tag₀, kind₁, …, kind_n, top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigItem {
    Kind(ComponentKind),
    Tag(GapTag),
    TopOpen(bool),
    Missing,
}

impl CanonSig {
    fn items(&self) -> Vec<SigItem> {
        let mut out = Vec::new();
        for (i, k) in self.component_kinds.iter().enumerate() {
            out.push(SigItem::Kind(*k));
            if let Some(t) = self.gap_tags.get(i) {
                out.push(SigItem::Tag(*t));
            }
        }
        out.push(SigItem::TopOpen(self.top_open));
        out
    }
}

/// First disagreement of two signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub position: usize,
    pub left: SigItem,
    pub right: SigItem,
}

impl fmt::Display for SigItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigItem::Kind(ComponentKind::Pt) => f.write_str("point"),
            SigItem::Kind(ComponentKind::Iv) => f.write_str("interval"),
            SigItem::Tag(t) => write!(f, "sigma {}", t.as_str()),
            SigItem::TopOpen(true) => f.write_str("max E < 1"),
            SigItem::TopOpen(false) => f.write_str("max E = 1"),
            SigItem::Missing => f.write_str("nothing"),
        }
    }
}

pub fn signature_mismatch(a: &EaterSpec, b: &EaterSpec) -> Option<Mismatch> {
    let (ia, ib) = (canonical_signature(a).items(), canonical_signature(b).items());
    (0..ia.len().max(ib.len())).find_map(|k| {
        let l = ia.get(k).cloned().unwrap_or(SigItem::Missing);
        let r = ib.get(k).cloned().unwrap_or(SigItem::Missing);
        (l != r).then_some(Mismatch { position: k, left: l, right: r })
    })
}

pub fn iso_decide(a: &EaterSpec, b: &EaterSpec) -> bool {
    canonical_signature(a) == canonical_signature(b)
}

/// The order-preserving bijection `E_a → E_b`, affine on interval components.
pub fn eater_map(a: &EaterSpec, b: &EaterSpec, e: &Rational) -> Result<Rational> {
    if let Some(m) = signature_mismatch(a, b) {
        return Err(Error::NotIsomorphic { position: m.position });
    }
    let i = a
        .components()
        .iter()
        .position(|c| c.contains(e))
        .ok_or_else(|| Error::Domain(format!("{} is not an eater", rational::display(e))))?;
    Ok(match (&a.components()[i], &b.components()[i]) {
        (Component::Interval(c, d), Component::Interval(c2, d2)) => c2 + (e - c) * (d2 - c2) / (d - c),
        (_, target) => target.left().clone(),
    })
}

/// `Φ(x)`: eaters through [`eater_map`], gap and top points keeping their
/// local offset (the identity member of the scaling family on `∞`-gaps).
pub fn iso_map(a: &EaterSpec, b: &EaterSpec, x: &SPoint) -> Result<SPoint> {
    build(a.clone()).check(x)?;
    let base = eater_map(a, b, &x.base)?;
    let target = build(b.clone()).eater(&base)?;
    Ok(SPoint { offset: x.offset.clone(), ..target })
}

/// Piecewise description of `Φ`, for witness files.
pub fn describe_map(a: &EaterSpec, b: &EaterSpec) -> Result<String> {
    if let Some(m) = signature_mismatch(a, b) {
        return Err(Error::NotIsomorphic { position: m.position });
    }
    let mut out = String::from("eaters:\n");
    for (ca, cb) in a.components().iter().zip(b.components()) {
        match (ca, cb) {
            (Component::Interval(c, d), Component::Interval(c2, d2)) => out.push_str(&format!(
                "  [{}, {}] -> [{}, {}] affine\n",
                rational::format(c),
                rational::format(d),
                rational::format(c2),
                rational::format(d2)
            )),
            _ => out.push_str(&format!("  {} -> {}\n", rational::format(ca.left()), rational::format(cb.left()))),
        }
    }
    out.push_str("gaps:\n");
    for (ga, gb) in a.gaps().iter().zip(b.gaps()) {
        let rule = match ga.tag {
            GapTag::One => "affine in local scale",
            GapTag::Infinity => "offset identity",
        };
        out.push_str(&format!(
            "  ({}, {}) -> ({}, {}) sigma {}: {rule}\n",
            rational::format(&ga.a),
            rational::format(&ga.b),
            rational::format(&gb.a),
            rational::format(&gb.b),
            ga.tag.as_str()
        ));
    }
    if a.top_open() {
        out.push_str(&format!(
            "top:\n  [{}, 1] -> [{}, 1] affine\n",
            rational::format(a.max_eater()),
            rational::format(b.max_eater())
        ));
    }
    Ok(out)
}

/// A shift `m` with `b_{n+m} = a_n` for all `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderShift {
    pub m: i64,
    /// Both sequences are constant: every `m` works.
    pub periodic: bool,
    /// The ladders share `r`; otherwise the decision rests on the
    /// order-isomorphic eater skeletons alone.
    pub same_r: bool,
}

fn markers(l: &LadderSpec) -> BTreeSet<i64> {
    let mut out: BTreeSet<i64> = l
        .exceptions
        .iter()
        .filter(|(n, t)| **t != if **n < 0 { l.left } else { l.right })
        .map(|(n, _)| *n)
        .collect();
    if l.left != l.right {
        out.insert(0);
    }
    out
}

/// Smallest `|m|` (ties to the positive shift) with `b_{n+m} = a_n`.
pub fn ladder_shift_equiv(a: &LadderSpec, b: &LadderSpec) -> Option<LadderShift> {
    let same_r = a.r == b.r;
    if a.left != b.left || a.right != b.right {
        return None;
    }
    let (ma, mb) = (markers(a), markers(b));
    if ma.len() != mb.len() {
        return None;
    }
    if ma.is_empty() {
        return Some(LadderShift { m: 0, periodic: true, same_r });
    }
    let mut candidates: Vec<i64> = mb.iter().map(|nb| nb - ma.iter().next().unwrap()).collect();
    candidates.sort_by_key(|m| (m.abs(), -m));
    let lo = ma.iter().chain(&mb).min().unwrap();
    let hi = ma.iter().chain(&mb).max().unwrap();
    candidates.into_iter().find_map(|m| {
        let ok = (lo - m.abs() - 1..=hi + m.abs() + 1).all(|n| a.sigma(n) == b.sigma(n + m));
        ok.then_some(LadderShift { m, periodic: false, same_r })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutFactor {
    /// `{f ∘ M_t ∘ f⁻¹ : t > 0}` on an `∞`-gap.
    Scaling { a: Rational, b: Rational },
    /// Every increasing bijection of an eater interval fixing its ends.
    IntervalBijections { c: Rational, d: Rational },
}

/// Automorphism group of a constructed algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutSignature {
    /// `{Id, 1 - Id}`: only for `E = {0}`.
    Reflection,
    /// Product of the listed factors; `{Id}` when empty.
    Product(Vec<AutFactor>),
}

pub fn aut_signature(spec: &EaterSpec) -> AutSignature {
    if spec.components() == [Component::Point(rational::zero())] {
        return AutSignature::Reflection;
    }
    let mut factors = Vec::new();
    for (i, c) in spec.components().iter().enumerate() {
        if let Component::Interval(c, d) = c {
            factors.push(AutFactor::IntervalBijections { c: c.clone(), d: d.clone() });
        }
        if i < spec.gap_tags().len() {
            let g = spec.gap(i);
            if g.tag == GapTag::Infinity {
                factors.push(AutFactor::Scaling { a: g.a, b: g.b });
            }
        }
    }
    AutSignature::Product(factors)
}

impl AutSignature {
    pub fn is_trivial(&self) -> bool {
        matches!(self, AutSignature::Product(f) if f.is_empty())
    }
}

impl fmt::Display for AutSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutSignature::Reflection => f.write_str("{Id, 1-Id}"),
            AutSignature::Product(v) if v.is_empty() => f.write_str("{Id}"),
            AutSignature::Product(v) => {
                let parts: Vec<String> = v
                    .iter()
                    .map(|x| match x {
                        AutFactor::Scaling { a, b } => format!(
                            "one-parameter scaling family {{f∘M_t∘f^-1 : t > 0}} on ({}, {})",
                            rational::format(a),
                            rational::format(b)
                        ),
                        AutFactor::IntervalBijections { c, d } => format!(
                            "all increasing bijections of [{}, {}]",
                            rational::format(c),
                            rational::format(d)
                        ),
                    })
                    .collect();
                f.write_str(&parts.join(" × "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plonka::LocateMode;
    use crate::rational::{int, ratio};
    use std::collections::BTreeMap;

    fn pts(e: &[Rational], t: &[GapTag]) -> EaterSpec {
        EaterSpec::points(e, t).unwrap()
    }

    #[test]
    fn signatures() {
        let s = canonical_signature(&pts(&[int(0), ratio(1, 2), int(1)], &[GapTag::One, GapTag::Infinity]));
        assert_eq!(s.component_kinds, vec![ComponentKind::Pt; 3]);
        assert!(!s.top_open);
        let s = canonical_signature(
            &EaterSpec::new(
                vec![Component::Point(int(0)), Component::Interval(ratio(1, 4), ratio(1, 3))],
                vec![GapTag::One],
            )
            .unwrap(),
        );
        assert_eq!(s.component_kinds, vec![ComponentKind::Pt, ComponentKind::Iv]);
        assert!(s.top_open);
        assert!(canonical_signature(&EaterSpec::trivial()).gap_tags.is_empty());
    }

    #[test]
    fn decide_examples() {
        let a = pts(&[int(0), ratio(1, 2), int(1)], &[GapTag::One, GapTag::Infinity]);
        let b = pts(&[int(0), ratio(1, 3), int(1)], &[GapTag::One, GapTag::Infinity]);
        let c = pts(&[int(0), ratio(1, 2), int(1)], &[GapTag::Infinity, GapTag::One]);
        assert!(iso_decide(&a, &b));
        assert!(!iso_decide(&a, &c));
        assert_eq!(signature_mismatch(&a, &c).unwrap().position, 1);
        assert!(!iso_decide(&EaterSpec::trivial(), &pts(&[int(0), int(1)], &[GapTag::One])));
    }

    #[test]
    fn map_examples() {
        let a = pts(&[int(0), ratio(1, 2)], &[GapTag::One]);
        let b = pts(&[int(0), ratio(1, 4)], &[GapTag::One]);
        let alg = build(a.clone());
        let x = alg.locate(&ratio(1, 4), LocateMode::ExactOnly).unwrap().point;
        assert_eq!(iso_map(&a, &b, &x).unwrap().embed_exact(), Some(ratio(1, 8)));
        let x = alg.locate(&ratio(3, 4), LocateMode::ExactOnly).unwrap().point;
        assert_eq!(iso_map(&a, &b, &x).unwrap().embed_exact(), Some(ratio(5, 8)));
        let e = alg.eater(&ratio(1, 2)).unwrap();
        assert_eq!(iso_map(&a, &b, &e).unwrap(), build(b.clone()).eater(&ratio(1, 4)).unwrap());
        let c = EaterSpec::trivial();
        assert!(matches!(iso_map(&a, &c, &e), Err(Error::NotIsomorphic { .. })));
    }

    #[test]
    fn ladder_shifts() {
        let r = ratio(1, 2);
        let one = LadderSpec::constant(r.clone(), GapTag::One);
        assert_eq!(
            ladder_shift_equiv(&one, &one),
            Some(LadderShift { m: 0, periodic: true, same_r: true })
        );
        let at = |n: i64| {
            LadderSpec::new(r.clone(), GapTag::One, GapTag::One, BTreeMap::from([(n, GapTag::Infinity)])).unwrap()
        };
        assert_eq!(ladder_shift_equiv(&at(0), &at(5)).map(|s| s.m), Some(5));
        assert_eq!(ladder_shift_equiv(&at(5), &at(0)).map(|s| s.m), Some(-5));
        assert_eq!(ladder_shift_equiv(&one, &at(0)), None);
    }

    #[test]
    fn automorphisms() {
        assert_eq!(aut_signature(&EaterSpec::trivial()), AutSignature::Reflection);
        assert!(aut_signature(&pts(&[int(0), int(1)], &[GapTag::One])).is_trivial());
        assert_eq!(
            aut_signature(&pts(&[int(0), int(1)], &[GapTag::Infinity])),
            AutSignature::Product(vec![AutFactor::Scaling { a: int(0), b: int(1) }])
        );
        let full = EaterSpec::new(vec![Component::Interval(int(0), int(1))], vec![]).unwrap();
        assert_eq!(
            aut_signature(&full),
            AutSignature::Product(vec![AutFactor::IntervalBijections { c: int(0), d: int(1) }])
        );
    }
}
