//! Finitely supported distributions over labels and lower semicontinuity
//! of homomorphic extensions.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Signed;
use rand::Rng;

use super::{mode_of, run_samples, LawReport, Sampler};
use crate::algebra::{liminf_estimate, AlgebraHandle, PointDist};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::rational::{self, Rational};

/// An element of the free algebra `𝒟A` over string labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dist {
    weights: BTreeMap<String, Rational>,
}

impl Dist {
    pub fn new(weights: BTreeMap<String, Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("empty distribution".into()));
        }
        if let Some((l, w)) = weights.iter().find(|(_, w)| !w.is_positive()) {
            return Err(Error::Domain(format!("weight of {l:?} is {}, not positive", rational::display(w))));
        }
        let total: Rational = weights.values().sum();
        if total != rational::one() {
            return Err(Error::Domain(format!("weights sum to {}, not 1", rational::display(&total))));
        }
        Ok(Dist { weights })
    }

    pub fn point_mass(label: impl Into<String>) -> Self {
        Dist { weights: BTreeMap::from([(label.into(), rational::one())]) }
    }

    pub fn weights(&self) -> &BTreeMap<String, Rational> {
        &self.weights
    }

    /// `(1-t)·self + t·other` for `t ∈ [0,1]`.
    pub fn mix(&self, other: &Dist, t: &Rational) -> Dist {
        let mut weights = BTreeMap::new();
        for (l, w) in &self.weights {
            *weights.entry(l.clone()).or_insert_with(rational::zero) += (rational::one() - t) * w;
        }
        for (l, w) in &other.weights {
            *weights.entry(l.clone()).or_insert_with(rational::zero) += t * w;
        }
        weights.retain(|_, w: &mut Rational| w.is_positive());
        Dist { weights }
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.weights.iter().map(|(l, w)| format!("{l}:{}", rational::display(w))).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `φ^#(d) = ⨁ p_a φ(a)`, folded in label order.
pub fn phi_sharp(alg: &AlgebraHandle, point_of: &BTreeMap<String, Point>, d: &Dist) -> Result<Point> {
    let entries = d
        .weights
        .iter()
        .map(|(l, w)| {
            let x = point_of.get(l).ok_or_else(|| Error::Domain(format!("no point for label {l:?}")))?;
            Ok((x.clone(), w.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    alg.barycenter(&PointDist::new(entries)?)
}

/// One straight-line probe `q_k = (1-2^-k)q + 2^-k d`; returns a witness on failure.
fn probe_line(
    alg: &AlgebraHandle,
    point_of: &BTreeMap<String, Point>,
    q: &Dist,
    dir: &Dist,
    depth: u32,
) -> Result<Option<String>> {
    let target = phi_sharp(alg, point_of, q)?;
    let seq = (1..=depth)
        .map(|k| phi_sharp(alg, point_of, &q.mix(dir, &rational::dyadic(k))))
        .collect::<Result<Vec<_>>>()?;
    let est = liminf_estimate(alg, &seq);
    Ok((!alg.le(&target, &est)).then(|| {
        format!("q={q} direction={dir}: liminf φ#(q_k) ≈ {est} < φ#(q) = {target}")
    }))
}

/// Lower semicontinuity of `φ^#` at `q` along each direction.
pub fn check_lc_bar(
    alg: &AlgebraHandle,
    point_of: &BTreeMap<String, Point>,
    q: &Dist,
    directions: &[Dist],
    depth: u32,
) -> Result<LawReport> {
    let mut failures = Vec::new();
    for d in directions {
        if let Some(w) = probe_line(alg, point_of, q, d, depth)? {
            failures.push(w);
        }
    }
    Ok(LawReport {
        law: "LC-bar".into(),
        samples: directions.len(),
        failures,
        mode: mode_of(alg),
        conditional: false,
    })
}

fn random_dist(rng: &mut impl Rng, labels: &[String]) -> Dist {
    let mut raw: BTreeMap<String, i64> = BTreeMap::new();
    let n = rng.gen_range(1..=labels.len());
    for _ in 0..n {
        let l = &labels[rng.gen_range(0..labels.len())];
        *raw.entry(l.clone()).or_default() += rng.gen_range(1..=8);
    }
    let total: i64 = raw.values().sum();
    Dist { weights: raw.into_iter().map(|(l, w)| (l, rational::ratio(w, total))).collect() }
}

/// (LC-bar) on `s.count` random `(φ, q, direction)` triples over five labels.
pub fn check_lc_bar_sampled(alg: &AlgebraHandle, s: &Sampler, depth: u32) -> LawReport {
    let labels: Vec<String> = ["a", "b", "c", "d", "e"].iter().map(|l| l.to_string()).collect();
    run_samples("LC-bar", alg, s, |rng, out| {
        let point_of: BTreeMap<String, Point> = labels.iter().map(|l| (l.clone(), s.point(alg, rng))).collect();
        let q = random_dist(rng, &labels);
        let dir = random_dist(rng, &labels);
        if let Some(w) = probe_line(alg, &point_of, &q, &dir, depth)? {
            out.push(format!("{w} with φ = {}", describe(&point_of)));
        }
        Ok(())
    })
}

fn describe(point_of: &BTreeMap<String, Point>) -> String {
    let parts: Vec<String> = point_of.iter().map(|(l, p)| format!("{l}↦{p}")).collect();
    parts.join(", ")
}

/// Lower semicontinuity of `Λ^ξ(d) = ⨁ p_a ξ_a` for a non-eater `w` and
/// `ξ` valued in `[V_{0,w}, w]`.
pub fn check_lambda_xi(
    alg: &AlgebraHandle,
    w: &Point,
    xi: &BTreeMap<String, Point>,
    q: &Dist,
    directions: &[Dist],
    depth: u32,
) -> Result<LawReport> {
    if alg.plonka().is_none() {
        return Err(Error::Precondition("Λ^ξ is defined for constructed algebras".into()));
    }
    if alg.eats(w, &alg.zero())? {
        return Err(Error::Precondition(format!("{w} is an eater")));
    }
    let v = alg.v_value(&alg.zero(), w)?;
    if let Some((l, x)) = xi.iter().find(|(_, x)| !alg.le(&v, x) || !alg.le(x, w)) {
        return Err(Error::Precondition(format!("ξ_{l} = {x} lies outside [{v}, {w}]")));
    }
    let mut r = check_lc_bar(alg, xi, q, directions, depth)?;
    r.law = "Lambda-xi".into();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::BlockKind;
    use crate::fixtures;
    use crate::plonka::LocateMode;
    use crate::rational::{int, ratio};
    use crate::spec::{EaterSpec, GapTag};

    fn labels(pairs: &[(&str, Point)]) -> BTreeMap<String, Point> {
        pairs.iter().map(|(l, p)| (l.to_string(), p.clone())).collect()
    }

    fn dist(pairs: &[(&str, (i64, i64))]) -> Dist {
        Dist::new(pairs.iter().map(|(l, (n, d))| (l.to_string(), ratio(*n, *d))).collect()).unwrap()
    }

    #[test]
    fn phi_sharp_examples() {
        let exp = AlgebraHandle::Block(BlockKind::Exp);
        let m = labels(&[("a", Point::zero()), ("b", Point::one())]);
        assert!(exp.eq(&phi_sharp(&exp, &m, &dist(&[("a", (1, 2)), ("b", (1, 2))])).unwrap(), &Point::one()));
        assert_eq!(phi_sharp(&exp, &m, &Dist::point_mass("a")).unwrap(), Point::zero());
        let lin = AlgebraHandle::Block(BlockKind::Linear);
        let m = labels(&[("a", Point::zero()), ("b", Point::exact(1, 2)), ("c", Point::one())]);
        let u = dist(&[("a", (1, 3)), ("b", (1, 3)), ("c", (1, 3))]);
        assert_eq!(phi_sharp(&lin, &m, &u).unwrap(), Point::exact(1, 2));
        assert!(phi_sharp(&lin, &m, &Dist::point_mass("z")).is_err());
    }

    #[test]
    fn lc_bar_examples() {
        let m = labels(&[("a", Point::one()), ("b", Point::exact(1, 3)), ("c", Point::zero())]);
        let dirs = [Dist::point_mass("b"), Dist::point_mass("c"), dist(&[("b", (1, 2)), ("c", (1, 2))])];
        let exp = AlgebraHandle::Block(BlockKind::Exp);
        assert!(check_lc_bar(&exp, &m, &Dist::point_mass("a"), &dirs, 40).unwrap().passed());
        let lin = AlgebraHandle::Block(BlockKind::Linear);
        assert!(check_lc_bar(&lin, &m, &dist(&[("a", (1, 4)), ("b", (3, 4))]), &dirs, 40).unwrap().passed());
        let m = labels(&[("a", Point::exact(1, 2)), ("b", Point::zero())]);
        let r = check_lc_bar(&fixtures::dualcap(), &m, &Dist::point_mass("a"), &[Dist::point_mass("b")], 40).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn lambda_xi_examples() {
        let alg = AlgebraHandle::structured(EaterSpec::points(&[int(0), ratio(1, 2)], &[GapTag::One]).unwrap());
        let at = |q: Rational| alg.point(&q, LocateMode::ExactOnly).unwrap();
        let w = at(ratio(1, 4));
        let xi = labels(&[("a", at(int(0))), ("b", at(ratio(1, 8))), ("c", at(ratio(1, 4)))]);
        let dirs = [Dist::point_mass("a"), Dist::point_mass("c")];
        let q = dist(&[("a", (1, 2)), ("b", (1, 2))]);
        assert!(check_lambda_xi(&alg, &w, &xi, &q, &dirs, 40).unwrap().passed());
        let same = labels(&[("a", w.clone()), ("b", w.clone()), ("c", w.clone())]);
        assert!(check_lambda_xi(&alg, &w, &same, &q, &dirs, 40).unwrap().passed());
        let bad = labels(&[("a", at(ratio(3, 8))), ("b", w.clone()), ("c", w.clone())]);
        assert!(matches!(check_lambda_xi(&alg, &w, &bad, &q, &dirs, 40), Err(Error::Precondition(_))));
    }
}
