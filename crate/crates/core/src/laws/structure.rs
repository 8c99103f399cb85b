//! Sampled checks of the structural facts about `V`, eaters and path kernels.

use super::{run_samples, LawReport, Sampler};
use crate::algebra::{AlgebraHandle, KernelClass};
use crate::classify::max_eater_below;
use crate::plonka::SPoint;
use crate::point::Point;
use crate::rational;
use crate::spec::EaterSpec;

/// Whether some eater `e` satisfies `lo < e < hi` in the structured order.
pub fn eaters_strictly_between(spec: &EaterSpec, lo: &SPoint, hi: &SPoint) -> bool {
    // (e,0) > lo ⇔ e > lo.base;  (e,0) < hi ⇔ e < hi.base, or e = hi.base with hi.offset > 0.
    let below_hi = |e: &rational::Rational| e < &hi.base || (e == &hi.base && !hi.is_eater());
    if hi.base > lo.base && below_hi(&hi.base) {
        return true;
    }
    lo.base < hi.base && spec.components().iter().any(|c| c.right() > &lo.base && c.left() < &hi.base)
}

/// For sampled `x ≤ y`: `V ⊳ x`, `x ≤ V ≤ y`, no eater in `(V, y)`, and
/// `V_{0,y} = max(E ∩ [0,y])`.
pub fn check_structure(alg: &AlgebraHandle, s: &Sampler) -> LawReport {
    run_samples("structure", alg, s, |rng, out| {
        let (x, y) = s.ordered_pair(alg, rng);
        let v = alg.v_value(&x, &y)?;
        if !alg.eats(&v, &x)? {
            out.push(format!("x={x} y={y}: V={v} does not eat x"));
        }
        if !alg.le(&x, &v) || !alg.le(&v, &y) {
            out.push(format!("x={x} y={y}: V={v} outside [x, y]"));
        }
        let Some(plonka) = alg.plonka() else { return Ok(()) };
        let (Point::Structured(vs), Point::Structured(ys)) = (&v, &y) else { return Ok(()) };
        if eaters_strictly_between(plonka.spec(), vs, ys) {
            out.push(format!("x={x} y={y}: an eater lies in (V, y) with V={v}"));
        }
        let v0 = alg.v_value(&alg.zero(), &y)?;
        let ambient = ys.embed_exact().or_else(|| rational::from_f64(ys.embed())).expect("finite embedding");
        let m = max_eater_below(plonka.spec().components(), &ambient).expect("0 is an eater");
        let expected = Point::Structured(plonka.eater(&m)?);
        if v0 != expected {
            out.push(format!("y={y}: V_(0,y)={v0} but max(E ∩ [0,y]) = {expected}"));
        }
        Ok(())
    })
}

/// `y ⊳ x` exactly when the kernel of `Γ_{x,y}` is right-collapsed or universal.
pub fn check_kernel_eats(alg: &AlgebraHandle, s: &Sampler) -> LawReport {
    run_samples("kernel-eats", alg, s, |rng, out| {
        let (x, y) = (s.point(alg, rng), s.point(alg, rng));
        for (a, b) in [(&x, &y), (&y, &x)] {
            let eats = alg.eats(b, a)?;
            let k = alg.kernel_class(a, b)?;
            if eats != matches!(k, KernelClass::RightCollapsed | KernelClass::Universal) {
                out.push(format!("x={a} y={b}: eats={eats} but kernel {k}"));
            }
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blocks::BlockKind;
    use crate::rational::{int, ratio};
    use crate::spec::{Component, GapTag};

    #[test]
    fn suites_pass_on_examples() {
        let s = Sampler::new(5, 300);
        let spec = EaterSpec::new(
            vec![Component::Point(int(0)), Component::Interval(ratio(1, 3), ratio(1, 2))],
            vec![GapTag::Infinity],
        )
        .unwrap();
        let alg = AlgebraHandle::structured(spec);
        let r = check_structure(&alg, &s);
        assert!(r.passed(), "{r}");
        assert!(check_kernel_eats(&alg, &s).passed());
        for k in BlockKind::ALL {
            assert!(check_kernel_eats(&AlgebraHandle::Block(k), &s).passed(), "{k}");
        }
    }

    #[test]
    fn between_oracle() {
        let spec = EaterSpec::points(&[int(0), ratio(1, 2)], &[GapTag::One]).unwrap();
        let a = crate::plonka::build(spec.clone());
        let z = a.zero();
        let g = a.gap_point(0, ratio(1, 2)).unwrap();
        let t = a.top_point(ratio(1, 2)).unwrap();
        assert!(!eaters_strictly_between(&spec, &z, &g));
        assert!(eaters_strictly_between(&spec, &z, &t));
        assert!(!eaters_strictly_between(&spec, &a.eater(&ratio(1, 2)).unwrap(), &t));
    }
}
