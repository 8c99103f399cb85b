//! Recovering `(E, tags)` from an algebra: read off for constructed
//! algebras, probed for black boxes.

use std::fmt;

use num_traits::Signed;
use rayon::prelude::*;

use crate::algebra::AlgebraHandle;
use crate::error::{Error, Result};
use crate::plonka::LocateMode;
use crate::point::{Param, Point};
use crate::rational::{self, Rational};
use crate::spec::{Component, EaterSpec, GapTag};

/// Bisection resolution for eater-set boundaries.
pub const BOUNDARY_BITS: u32 = 40;
/// Bisection steps when inverting a path on its parameter.
pub const PARAM_BITS: u32 = 60;

/// Probe settings for black-box classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeConfig {
    pub grid: u32,
    /// Number of `t_k` terms.
    pub depth: u32,
    /// Divergence threshold for `t_k`.
    pub threshold: f64,
    /// Relative step size below which `t_k` counts as converged.
    pub conv_tol: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { grid: 64, depth: 30, threshold: 1e3, conv_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Exact,
    Probed(ProbeConfig),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Exact => f.write_str("exact"),
            Provenance::Probed(c) => write!(f, "probed(grid={}, K={}, T={})", c.grid, c.depth, c.threshold),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub spec: EaterSpec,
    pub provenance: Provenance,
}

fn eats_zero(alg: &AlgebraHandle, y: &Rational) -> Result<bool> {
    let y = alg.point(y, LocateMode::AllowApprox)?;
    alg.eats(&y, &alg.zero())
}

/// `y ⊳ 0` with the float tolerance scaled to the distance from a known
/// eater, so that boundaries resolve below the absolute tolerance.
fn eats_zero_near(alg: &AlgebraHandle, y: &Rational, eater: &Rational) -> Result<bool> {
    if alg.is_exact() {
        return eats_zero(alg, y);
    }
    let p = alg.point(y, LocateMode::AllowApprox)?;
    let r = alg.combine(&p, &alg.zero(), &Param::half())?;
    let scale = rational::to_f64(&(y - eater).abs());
    Ok((r.to_f64() - p.to_f64()).abs() <= alg.tol() * scale)
}

/// Bisects between a hit (`eats`) and a miss until they are `2^-40` apart;
/// returns the hit side.
fn refine(alg: &AlgebraHandle, mut hit: Rational, mut miss: Rational) -> Result<Rational> {
    let resolution = rational::dyadic(BOUNDARY_BITS);
    while (&hit - &miss).abs() > resolution {
        let mid = (&hit + &miss) / rational::int(2);
        if eats_zero_near(alg, &mid, &hit)? {
            hit = mid;
        } else {
            miss = mid;
        }
    }
    Ok(hit)
}

/// The eater set `{y : y ⊳ 0}` as a list of closed components.
///
/// Black boxes are scanned on the grid `i/grid`; every run of hits becomes a
/// component whose ends are refined by bisection. Components narrower than
/// the grid step can be missed.
pub fn extract_e(alg: &AlgebraHandle, grid: u32) -> Result<Vec<Component>> {
    if let Some(a) = alg.plonka() {
        return Ok(a.spec().components().to_vec());
    }
    if grid < 2 {
        return Err(Error::Precondition("grid must be at least 2".into()));
    }
    let at = |i: u32| rational::ratio(i as i64, grid as i64);
    let hits = (0..=grid).into_par_iter().map(|i| eats_zero(alg, &at(i))).collect::<Result<Vec<_>>>()?;
    if !hits[0] {
        return Err(Error::Precondition("0 does not eat 0; not a convex algebra".into()));
    }
    let mut runs = Vec::new();
    let mut i = 0;
    while i <= grid {
        if hits[i as usize] {
            let start = i;
            while i < grid && hits[i as usize + 1] {
                i += 1;
            }
            runs.push((start, i));
        }
        i += 1;
    }
    runs.into_par_iter()
        .map(|(s, e)| {
            let left = if s == 0 { rational::zero() } else { refine(alg, at(s), at(s - 1))? };
            let right = if e == grid { rational::one() } else { refine(alg, at(e), at(e + 1))? };
            Ok(if left == right { Component::Point(left) } else { Component::Interval(left, right) })
        })
        .collect()
}

/// Solves `Γ_{a,y}(t) = target` for `t` by bisection; `Γ` increases on gap
/// segments.
fn invert_path(alg: &AlgebraHandle, a: &Point, y: &Point, target: &Point) -> Result<Rational> {
    let (mut lo, mut hi) = (rational::zero(), rational::one());
    for _ in 0..PARAM_BITS {
        let mid = (&lo + &hi) / rational::int(2);
        let g = alg.gamma(a, y, &Param::new(mid.clone())?)?;
        if alg.cmp(&g, target).is_lt() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / rational::int(2))
}

/// The tag of the gap `(a,b)`.
///
/// Black boxes are probed at `y_k = b - (b-a)/2^k`: with
/// `r_k = Γ_{a,y_{k+1}}^{-1}(y_k)` the normalised positions
/// `t_k = (r_1 ⋯ r_k)^{-1}` stay bounded for tag `1` and diverge for `∞`.
/// Besides the plain rules (`t_K > T` or a relative step below
/// `conv_tol`), the last two increments are extrapolated geometrically so
/// that slowly diverging sequences — `t_k` grows linearly for the
/// exponential block — are recognised at moderate depth.
pub fn extract_tau(alg: &AlgebraHandle, a: &Rational, b: &Rational, cfg: &ProbeConfig) -> Result<GapTag> {
    let not_a_gap = |detail: &str| Error::NotAGap {
        a: rational::to_f64(a),
        b: rational::to_f64(b),
        detail: detail.to_owned(),
    };
    if let Some(p) = alg.plonka() {
        return p
            .spec()
            .gaps()
            .into_iter()
            .find(|g| &g.a == a && &g.b == b)
            .map(|g| g.tag)
            .ok_or_else(|| not_a_gap("not a gap of the spec"));
    }
    if a >= b {
        return Err(not_a_gap("empty interval"));
    }
    if !eats_zero(alg, a)? || !eats_zero(alg, b)? {
        return Err(not_a_gap("an endpoint is not an eater"));
    }
    if eats_zero(alg, &((a + b) / rational::int(2)))? {
        return Err(not_a_gap("the midpoint is an eater"));
    }
    let y = |k: u32| alg.point(&(b - (b - a) * rational::dyadic(k)), LocateMode::AllowApprox);
    let pa = alg.point(a, LocateMode::AllowApprox)?;
    let ratios = (1..=cfg.depth)
        .into_par_iter()
        .map(|k| Ok(rational::to_f64(&invert_path(alg, &pa, &y(k + 1)?, &y(k)?)?)))
        .collect::<Result<Vec<f64>>>()?;
    let mut t = Vec::with_capacity(ratios.len());
    let mut prod = 1.0;
    for r in ratios {
        prod *= r;
        if prod <= 0.0 {
            return Err(not_a_gap("the path does not separate the probes"));
        }
        t.push(1.0 / prod);
    }
    decide_tau(&t, cfg).ok_or_else(|| Error::Undecided {
        a: rational::to_f64(a),
        b: rational::to_f64(b),
        detail: format!("t_k = {:?}", &t[t.len().saturating_sub(3)..]),
    })
}

/// Decision rule on the `t_k` sequence.
pub fn decide_tau(t: &[f64], cfg: &ProbeConfig) -> Option<GapTag> {
    let n = t.len();
    let last = *t.last()?;
    if !last.is_finite() || last > cfg.threshold {
        return Some(GapTag::Infinity);
    }
    if n < 3 {
        return None;
    }
    let d1 = t[n - 1] - t[n - 2];
    let d0 = t[n - 2] - t[n - 3];
    if d1.abs() < cfg.conv_tol * last.abs() {
        return Some(GapTag::One);
    }
    if d0 <= 0.0 || d1 <= 0.0 {
        return None;
    }
    let rho = d1 / d0;
    if rho >= 1.0 - 1e-3 {
        return Some(GapTag::Infinity);
    }
    let tail = d1 * rho / (1.0 - rho);
    if last + tail > cfg.threshold {
        Some(GapTag::Infinity)
    } else if tail <= cfg.conv_tol * last {
        Some(GapTag::One)
    } else {
        None
    }
}

/// Full classification data of an algebra.
pub fn classify(alg: &AlgebraHandle, cfg: &ProbeConfig) -> Result<Classification> {
    if let Some(p) = alg.plonka() {
        return Ok(Classification { spec: p.spec().clone(), provenance: Provenance::Exact });
    }
    let comps = extract_e(alg, cfg.grid)?;
    let tags = comps
        .par_windows(2)
        .map(|w| extract_tau(alg, w[0].right(), w[1].left(), cfg))
        .collect::<Result<Vec<_>>>()?;
    let spec = EaterSpec::new(comps, tags)?;
    Ok(Classification { spec, provenance: Provenance::Probed(*cfg) })
}

/// `max(E ∩ [0,y])` for a component list.
pub fn max_eater_below(comps: &[Component], y: &Rational) -> Option<Rational> {
    comps
        .iter()
        .take_while(|c| c.left() <= y)
        .last()
        .map(|c| rational::min(c.right(), y).clone())
}

/// Whether `V_{0,y} = max(E ∩ [0,y])`.
pub fn check_v_max_formula(alg: &AlgebraHandle, y: &Rational, grid: u32) -> Result<bool> {
    let comps = extract_e(alg, grid)?;
    let m = max_eater_below(&comps, y).ok_or_else(|| Error::Precondition("E has no point below y".into()))?;
    let v = alg.v_value(&alg.zero(), &alg.point(y, LocateMode::AllowApprox)?)?;
    let m = alg.point(&m, LocateMode::AllowApprox)?;
    Ok(match alg.plonka() {
        Some(_) => v == m,
        None => (v.to_f64() - m.to_f64()).abs() <= alg.tol().max(rational::to_f64(&rational::dyadic(BOUNDARY_BITS))),
    })
}
