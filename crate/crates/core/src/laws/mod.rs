//! Seeded, sampled verification of the convex-algebra axioms and the
//! order and continuity laws.
//!
//! Each sample draws from its own ChaCha stream (seed, index), so reports
//! are identical whatever the thread count.

mod dist;
mod structure;

pub use dist::{check_lambda_xi, check_lc_bar, check_lc_bar_sampled, phi_sharp, Dist};
pub use structure::{check_kernel_eats, check_structure, eaters_strictly_between};

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{monotone_limit, AlgebraHandle};
use crate::error::Result;
use crate::point::{Param, Point};
use crate::rational::{self, Rational};
use crate::spec::{Component, EaterSpec, GapTag};

/// Largest denominator of sampled rationals.
pub const MAX_DEN: i64 = 64;
/// Sampled `∞`-gap offsets lie in `[0, INF_OFFSET_RANGE)`.
pub const INF_OFFSET_RANGE: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Block-stratified for constructed algebras, uniform rationals otherwise.
    Auto,
    UniformRational { max_den: i64 },
    BlockStratified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
    pub strategy: Strategy,
}

impl Sampler {
    pub fn new(seed: u64, count: usize) -> Self {
        Sampler { seed, count, strategy: Strategy::Auto }
    }

    /// Independent stream for sample `index`.
    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    pub fn point(&self, alg: &AlgebraHandle, rng: &mut impl Rng) -> Point {
        match (self.strategy, alg.plonka()) {
            (Strategy::Auto | Strategy::BlockStratified, Some(_)) => stratified_point(alg, rng),
            (Strategy::UniformRational { max_den }, _) => uniform_point(alg, rng, max_den),
            _ => uniform_point(alg, rng, MAX_DEN),
        }
    }

    /// Two sampled points, sorted.
    pub fn ordered_pair(&self, alg: &AlgebraHandle, rng: &mut impl Rng) -> (Point, Point) {
        let (a, b) = (self.point(alg, rng), self.point(alg, rng));
        if alg.cmp(&a, &b).is_le() {
            (a, b)
        } else {
            (b, a)
        }
    }
}

/// A rational `n/d` with `d ≤ max_den`, `lo ≤ n/d ≤ 1` (`n/d < 1` if `open_top`).
fn unit_rational(rng: &mut impl Rng, max_den: i64, open_top: bool) -> Rational {
    let d = rng.gen_range(1..=max_den);
    let n = if open_top { rng.gen_range(0..d) } else { rng.gen_range(0..=d) };
    rational::ratio(n, d)
}

/// A parameter in the open interval `(0,1)`.
pub fn sample_param(rng: &mut impl Rng) -> Param {
    let d = rng.gen_range(2..=MAX_DEN);
    Param::new(rational::ratio(rng.gen_range(1..d), d)).expect("in (0,1)")
}

fn uniform_point(alg: &AlgebraHandle, rng: &mut impl Rng, max_den: i64) -> Point {
    let q = match rng.gen_range(0..8) {
        0 => rational::zero(),
        1 => rational::one(),
        _ => unit_rational(rng, max_den, false),
    };
    match alg {
        AlgebraHandle::Numeric(_) => Point::Float(rational::to_f64(&q)),
        _ => Point::Exact(q),
    }
}

fn stratified_point(alg: &AlgebraHandle, rng: &mut impl Rng) -> Point {
    let a = alg.plonka().expect("constructed algebra");
    let spec = a.spec();
    let n_comp = spec.components().len();
    let n_gap = spec.gap_tags().len();
    let regions = n_comp + n_gap + usize::from(spec.top_open());
    let r = rng.gen_range(0..regions);
    let s = if r < n_comp {
        let e = match &spec.components()[r] {
            Component::Point(e) => e.clone(),
            Component::Interval(c, d) => c + (d - c) * unit_rational(rng, MAX_DEN, false),
        };
        a.eater(&e).expect("inside a component")
    } else if r < n_comp + n_gap {
        let i = r - n_comp;
        let offset = match spec.gap_tags()[i] {
            GapTag::One => unit_rational(rng, MAX_DEN, true),
            GapTag::Infinity => unit_rational(rng, MAX_DEN, true) * rational::int(INF_OFFSET_RANGE),
        };
        a.gap_point(i, offset).expect("valid offset")
    } else {
        a.top_point(unit_rational(rng, MAX_DEN, false)).expect("valid offset")
    };
    Point::Structured(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Exact,
    Tol(f64),
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Tol(t) => write!(f, "tol({t:e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub law: String,
    pub samples: usize,
    pub failures: Vec<String>,
    pub mode: Mode,
    /// The law's probe is only sound under (MO), which failed.
    pub conditional: bool,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Tolerance actually used.
    pub fn tol(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::Tol(t) => t,
        }
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<14} {:>7} samples  {:<12} {}",
            self.law,
            self.samples,
            self.mode.to_string(),
            if self.passed() { "pass".to_owned() } else { format!("FAIL ({})", self.failures.len()) }
        )?;
        if self.conditional {
            f.write_str("  [conditional: (MO) failed]")?;
        }
        if let Some(w) = self.failures.first() {
            write!(f, "\n    witness: {w}")?;
        }
        Ok(())
    }
}

pub(crate) fn mode_of(alg: &AlgebraHandle) -> Mode {
    if alg.tol() == 0.0 {
        Mode::Exact
    } else {
        Mode::Tol(alg.tol())
    }
}

/// Runs `body` on every sample index in parallel and merges failures in
/// index order. Errors raised by the algebra count as failures.
pub(crate) fn run_samples<F>(law: &str, alg: &AlgebraHandle, s: &Sampler, body: F) -> LawReport
where
    F: Fn(&mut ChaCha8Rng, &mut Vec<String>) -> Result<()> + Sync,
{
    let failures = (0..s.count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = s.rng(i);
            let mut out = Vec::new();
            if let Err(e) = body(&mut rng, &mut out) {
                out.push(format!("error: {e}"));
            }
            out.into_iter().map(move |w| format!("#{i}: {w}")).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    LawReport { law: law.to_owned(), samples: s.count, failures, mode: mode_of(alg), conditional: false }
}

/// Probe indices for a depth-`K` monotone limit: a sparse increasing run
/// (monotonicity is asserted along it) ending in the five consecutive
/// terms `K-4..=K` that the extrapolation needs.
pub fn probe_depths(depth: u32) -> Vec<u32> {
    let tail_start = depth.saturating_sub(4).max(1);
    let mut ks = Vec::new();
    let mut k = 1;
    while k < tail_start {
        ks.push(k);
        k += (k / 2).max(1);
    }
    ks.extend(tail_start..=depth);
    ks
}

fn one_minus(p: &Param) -> Param {
    p.complement()
}

pub fn check_axioms(alg: &AlgebraHandle, s: &Sampler) -> LawReport {
    run_samples("axioms", alg, s, |rng, out| {
        let (x, y, z) = (s.point(alg, rng), s.point(alg, rng), s.point(alg, rng));
        let (p, q) = (sample_param(rng), sample_param(rng));
        let xx = alg.combine(&x, &x, &p)?;
        if !alg.eq(&xx, &x) {
            out.push(format!("idempotence: x={x} p={p}: x⊕x={xx}"));
        }
        let (l, r) = (alg.combine(&x, &y, &p)?, alg.combine(&y, &x, &one_minus(&p))?);
        if !alg.eq(&l, &r) {
            out.push(format!("commutativity: x={x} y={y} p={p}: {l} ≠ {r}"));
        }
        let pq = p.value() * q.value();
        if pq != rational::one() {
            let inner = (rational::one() - p.value()) * q.value() / (rational::one() - &pq);
            let lhs = alg.combine(&alg.combine(&x, &y, &p)?, &z, &q)?;
            let rhs = alg.combine(&x, &alg.combine(&y, &z, &Param::new(inner)?)?, &Param::new(pq)?)?;
            if !alg.eq(&lhs, &rhs) {
                out.push(format!("associativity: x={x} y={y} z={z} p={p} q={q}: {lhs} ≠ {rhs}"));
            }
        }
        if !alg.eq(&alg.combine(&x, &y, &Param::one())?, &x) || !alg.eq(&alg.combine(&x, &y, &Param::zero())?, &y) {
            out.push(format!("projection: x={x} y={y}"));
        }
        Ok(())
    })
}

pub fn check_mo(alg: &AlgebraHandle, s: &Sampler) -> LawReport {
    run_samples("MO", alg, s, |rng, out| {
        let (x, x2) = s.ordered_pair(alg, rng);
        let (y, y2) = s.ordered_pair(alg, rng);
        let (p, p2) = {
            let (a, b) = (sample_param(rng), sample_param(rng));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        let (l, r) = (alg.combine(&x, &y, &p)?, alg.combine(&x2, &y, &p)?);
        if !alg.le(&l, &r) {
            out.push(format!("monotone in x: x={x} ≤ x'={x2} y={y} p={p}: {l} ≰ {r}"));
        }
        let (l2, r2) = (alg.combine(&y, &x, &p)?, alg.combine(&y, &x2, &p)?);
        if !alg.le(&l2, &r2) {
            out.push(format!("monotone in y: y={y} x={x} ≤ x'={x2} p={p}: {l2} ≰ {r2}"));
        }
        let j = alg.combine(&x2, &y2, &p)?;
        if !alg.le(&l, &j) {
            out.push(format!("joint: ({x},{y}) ≤ ({x2},{y2}) p={p}: {l} ≰ {j}"));
        }
        let (lo, hi) = if alg.cmp(&x, &y).is_le() { (&x, &y) } else { (&y, &x) };
        if !alg.le(lo, &l) || !alg.le(&l, hi) {
            out.push(format!("betweenness: x={x} y={y} p={p}: {l} outside [{lo}, {hi}]"));
        }
        let (a, b) = (alg.combine(hi, lo, &p)?, alg.combine(hi, lo, &p2)?);
        if !alg.le(&a, &b) {
            out.push(format!("parameter: y={hi} ≥ x={lo}, p={p} ≤ p'={p2}: {a} ≰ {b}"));
        }
        Ok(())
    })
}

/// `x + ε_k` along the dyadic sequence; structured points move inside their
/// own block (or component), which under (MO) has the same limit.
fn nudge_up(alg: &AlgebraHandle, x: &Point, y: &Point, k: u32) -> Option<(Point, Point)> {
    match (x, y) {
        (Point::Structured(a), Point::Structured(b)) => {
            let p = alg.plonka()?;
            Some((p.step_up(a, k)?.into(), p.step_up(b, k)?.into()))
        }
        (Point::Exact(a), Point::Exact(b)) => {
            let top = if a >= b { a } else { b };
            let eps = (rational::one() - top) * rational::dyadic(k);
            Some((Point::Exact(a + &eps), Point::Exact(b + eps)))
        }
        _ => {
            let (a, b) = (x.to_f64(), y.to_f64());
            let eps = (1.0 - a.max(b)) * 0.5f64.powi(k as i32);
            Some((Point::Float(a + eps), Point::Float(b + eps)))
        }
    }
}

pub fn check_uc(alg: &AlgebraHandle, s: &Sampler, depth: u32) -> LawReport {
    run_samples("UC", alg, s, |rng, out| {
        let one = alg.one();
        let (x, y) = (s.point(alg, rng), s.point(alg, rng));
        let p = sample_param(rng);
        if alg.eq(&x, &one) || alg.eq(&y, &one) {
            return Ok(());
        }
        let mut seq: Vec<Point> = Vec::new();
        for k in probe_depths(depth) {
            let Some((a, b)) = nudge_up(alg, &x, &y, k) else { return Ok(()) };
            let v = alg.combine(&a, &b, &p)?;
            if let Some(prev) = seq.last() {
                if !alg.le(&v, prev) {
                    out.push(format!("(MO) probe not monotone: x={x} y={y} p={p} k={k}: {v} > {prev}"));
                    return Ok(());
                }
            }
            seq.push(v);
        }
        let limit = monotone_limit(alg, &seq);
        let base = alg.combine(&x, &y, &p)?;
        if !alg.le(&limit, &base) {
            out.push(format!("x={x} y={y} p={p}: lim (x+ε)⊕(y+ε) = {limit} > x⊕y = {base}"));
        }
        Ok(())
    })
}

pub fn check_lc(alg: &AlgebraHandle, s: &Sampler, depth: u32) -> LawReport {
    run_samples("LC", alg, s, |rng, out| {
        let (x, y) = s.ordered_pair(alg, rng);
        let mut seq: Vec<Point> = Vec::new();
        for k in probe_depths(depth) {
            let w = alg.combine(&y, &x, &Param::new(rational::one() - rational::dyadic(k))?)?;
            if let Some(prev) = seq.last() {
                if !alg.le(prev, &w) {
                    out.push(format!("(MO) probe not monotone: x={x} y={y} k={k}: {w} < {prev}"));
                    return Ok(());
                }
            }
            seq.push(w);
        }
        let limit = monotone_limit(alg, &seq);
        if !alg.le(&y, &limit) {
            out.push(format!("x={x} y={y}: lim y⊕_(1-2^-k) x = {limit} < y"));
        }
        Ok(())
    })
}

pub fn check_cancellation(alg: &AlgebraHandle, s: &Sampler) -> LawReport {
    run_samples("cancellation", alg, s, |rng, out| {
        let mut pts = [s.point(alg, rng), s.point(alg, rng), s.point(alg, rng)];
        pts.sort_by(|a, b| alg.cmp(a, b));
        let [z, x, y] = pts;
        let p = sample_param(rng);
        let (l, r) = (alg.combine(&x, &z, &p)?, alg.combine(&y, &z, &p)?);
        if alg.eq(&l, &r) && !alg.eq(&x, &y) {
            out.push(format!("z={z} x={x} y={y} p={p}: x⊕z = y⊕z = {l} but x ≠ y"));
        }
        Ok(())
    })
}

/// The five core suites; (UC) and (LC) are marked conditional when (MO) fails.
pub fn run_core_suites(alg: &AlgebraHandle, s: &Sampler, depth: u32) -> Vec<LawReport> {
    let mo = check_mo(alg, s);
    let conditional = !mo.passed();
    let mut uc = check_uc(alg, s, depth);
    let mut lc = check_lc(alg, s, depth);
    uc.conditional = conditional;
    lc.conditional = conditional;
    vec![check_axioms(alg, s), mo, uc, lc, check_cancellation(alg, s)]
}

/// A random validated spec with at most `max_components` components on a
/// grid of denominator `≤ 64`, with mixed tags.
pub fn random_spec(rng: &mut impl Rng, max_components: usize) -> EaterSpec {
    let den = [12i64, 30, 60, 64][rng.gen_range(0..4)];
    let n = rng.gen_range(1..=max_components.max(1));
    // Endpoints need up to 2n - 1 distinct grid values after 0.
    let mut cuts: Vec<i64> = rand::seq::index::sample(rng, den as usize, (2 * n - 1).min(den as usize))
        .into_iter()
        .map(|i| i as i64 + 1)
        .collect();
    cuts.sort_unstable();
    let mut cuts = std::iter::once(0).chain(cuts).peekable();
    let mut comps = Vec::new();
    while comps.len() < n {
        let Some(c) = cuts.next() else { break };
        let interval = rng.gen_bool(0.3);
        match cuts.peek() {
            Some(&d) if interval => {
                cuts.next();
                comps.push(Component::Interval(rational::ratio(c, den), rational::ratio(d, den)));
            }
            _ => comps.push(Component::Point(rational::ratio(c, den))),
        }
    }
    let tags = (1..comps.len())
        .map(|_| if rng.gen_bool(0.5) { GapTag::One } else { GapTag::Infinity })
        .collect();
    EaterSpec::new(comps, tags).expect("generated spec is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExactOp;
    use crate::blocks::BlockKind;
    use crate::fixtures;
    use crate::rational::{int, ratio};

    fn names(reports: &[LawReport]) -> Vec<&str> {
        reports.iter().filter(|r| !r.passed()).map(|r| r.law.as_str()).collect()
    }

    #[test]
    fn blocks_pass() {
        let s = Sampler::new(7, 400);
        for k in BlockKind::ALL {
            let alg = AlgebraHandle::Block(k);
            let r = run_core_suites(&alg, &s, 40);
            assert!(names(&r).is_empty(), "{k}: {r:?}");
            assert_eq!(r[0].mode, if k.is_exact() { Mode::Exact } else { Mode::Tol(1e-9) });
        }
    }

    #[test]
    fn structured_passes() {
        let s = Sampler::new(11, 300);
        let spec = EaterSpec::new(
            vec![
                Component::Point(int(0)),
                Component::Interval(ratio(1, 4), ratio(1, 3)),
                Component::Point(ratio(1, 2)),
            ],
            vec![GapTag::Infinity, GapTag::One],
        )
        .unwrap();
        let r = run_core_suites(&AlgebraHandle::structured(spec), &s, 40);
        assert!(names(&r).is_empty(), "{r:?}");
    }

    #[test]
    fn fixtures_fail_their_laws() {
        let s = Sampler::new(3, 2000);
        assert_eq!(names(&run_core_suites(&fixtures::psq(), &s, 40)), vec!["axioms"]);
        assert_eq!(names(&run_core_suites(&fixtures::threshold(), &s, 40)), vec!["UC"]);
        assert_eq!(names(&run_core_suites(&fixtures::dualcap(), &s, 40)), vec!["UC", "LC", "cancellation"]);
    }

    #[test]
    fn abs_diff_breaks_monotonicity() {
        let alg = AlgebraHandle::Exact(ExactOp { name: "absdiff", f: |x, y, _| num_traits::Signed::abs(&(x - y)) });
        assert!(!check_mo(&alg, &Sampler::new(1, 500)).passed());
        let h = Param::half();
        let (a, b) = (alg.combine(&Point::zero(), &Point::one(), &h).unwrap(), alg.combine(&Point::exact(1, 2), &Point::one(), &h).unwrap());
        assert!(!alg.le(&a, &b));
    }

    #[test]
    fn probe_depth_schedule() {
        assert_eq!(probe_depths(40), vec![1, 2, 3, 4, 6, 9, 13, 19, 28, 36, 37, 38, 39, 40]);
        assert_eq!(probe_depths(3), vec![1, 2, 3]);
    }

    #[test]
    fn replay_is_deterministic() {
        let s = Sampler::new(99, 300);
        let a = run_core_suites(&fixtures::psq(), &s, 20);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_core_suites(&fixtures::psq(), &s, 20));
        assert_eq!(a, b);
    }
}
