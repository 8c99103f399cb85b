//! Probing a constructed algebra as a black box recovers its spec, as long
//! as every component and gap is wider than the probe grid.

use plonka::classify::{classify, ProbeConfig};
use plonka::rational::{self, ratio, Rational};
use plonka::{AlgebraHandle, Component, EaterSpec, GapTag, NumericOp};
use proptest::prelude::*;

const LATTICE: i64 = 16;

fn close(a: &Rational, b: &Rational) -> bool {
    (rational::to_f64(a) - rational::to_f64(b)).abs() <= 1e-8
}

/// Walks the lattice `k/16`, choosing at each free slot: skip, point, or a
/// one-step interval. Chosen pieces are separated by at least one empty slot.
fn lattice_spec() -> impl Strategy<Value = EaterSpec> {
    (prop::collection::vec(0u8..3, LATTICE as usize), prop::collection::vec(any::<bool>(), LATTICE as usize))
        .prop_map(|(choices, tags)| {
            let mut comps = vec![Component::Point(rational::zero())];
            let mut k = 2;
            for c in choices {
                if k > LATTICE {
                    break;
                }
                match c {
                    1 => {
                        comps.push(Component::Point(ratio(k, LATTICE)));
                        k += 2;
                    }
                    2 if k < LATTICE => {
                        comps.push(Component::Interval(ratio(k, LATTICE), ratio(k + 1, LATTICE)));
                        k += 3;
                    }
                    _ => k += 1,
                }
            }
            let tags = tags
                .into_iter()
                .take(comps.len() - 1)
                .map(|inf| if inf { GapTag::Infinity } else { GapTag::One })
                .collect();
            EaterSpec::new(comps, tags).expect("lattice specs are valid")
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn probed_spec_matches(spec in lattice_spec()) {
        let got = classify(&AlgebraHandle::Numeric(NumericOp::probe(spec.clone())), &ProbeConfig::default())
            .map_err(|e| TestCaseError::fail(format!("{spec}: {e}")))?
            .spec;
        prop_assert_eq!(got.gap_tags(), spec.gap_tags(), "{} came back as {}", spec, got);
        prop_assert_eq!(got.components().len(), spec.components().len(), "{} came back as {}", spec, got);
        for (g, w) in got.components().iter().zip(spec.components()) {
            prop_assert!(
                g.is_interval() == w.is_interval() && close(g.left(), w.left()) && close(g.right(), w.right()),
                "{} came back as {}", spec, got
            );
        }
    }
}

#[test]
fn sub_grid_features_are_merged_or_missed() {
    // the probe grid only sees what lands on it: an isolated eater at 1/6 is invisible to grid 64
    let spec = EaterSpec::points(&[rational::zero(), ratio(1, 6)], &[GapTag::One]).unwrap();
    let got = classify(&AlgebraHandle::Numeric(NumericOp::probe(spec)), &ProbeConfig::default()).unwrap();
    assert_eq!(got.spec, EaterSpec::trivial());
}
