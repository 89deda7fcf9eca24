mod common;

use common::{j1_oracle, random_step_path};
use heavytail_ldp::cadlag::{j1_distance, Jump, StepPath};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-4;

#[test]
fn oracle_on_hand_examples() {
    let x = StepPath::new(vec![Jump::new(0.5, 1.0)]).unwrap();
    let y = StepPath::new(vec![Jump::new(0.6, 1.0)]).unwrap();
    assert!((j1_oracle(&x, &y) - 0.1).abs() < 1e-12);
    assert!((j1_oracle(&x, &StepPath::zero()) - 1.0).abs() < 1e-12);
    let z = StepPath::new(vec![Jump::new(0.5, 0.1)]).unwrap();
    assert!((j1_oracle(&z, &StepPath::new(vec![Jump::new(0.9, 0.1)]).unwrap()) - 0.1).abs() < 1e-12);
}

#[test]
fn dp_matches_time_change_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..150 {
        let x = random_step_path(&mut rng, 3);
        let y = random_step_path(&mut rng, 3);
        let d = j1_distance(&x, &y, TOL).unwrap();
        let o = j1_oracle(&x, &y);
        assert!((d - o).abs() <= 0.02, "{x:?} {y:?}: dp {d}, oracle {o}");
    }
}

fn step_path() -> impl Strategy<Value = StepPath> {
    prop::collection::vec((1u32..100, prop::sample::select(vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])), 0..4).prop_map(
        |v| {
            let mut seen = std::collections::BTreeMap::new();
            for (t, s) in v {
                seen.insert(t, s);
            }
            StepPath::new(seen.into_iter().map(|(t, s)| Jump::new(t as f64 / 100.0, s)).collect()).unwrap()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metric_axioms(x in step_path(), y in step_path(), z in step_path()) {
        let dxy = j1_distance(&x, &y, TOL).unwrap();
        let dyx = j1_distance(&y, &x, TOL).unwrap();
        let dxz = j1_distance(&x, &z, TOL).unwrap();
        let dzy = j1_distance(&z, &y, TOL).unwrap();
        prop_assert_eq!(dxy, dyx);
        prop_assert!(dxy <= dxz + dzy + 3.0 * TOL);
        prop_assert!(dxy <= x.sup_distance(&y) + TOL);
        prop_assert_eq!(j1_distance(&x, &x, TOL).unwrap(), 0.0);
    }

    #[test]
    fn fewer_up_jumps_are_far(x in step_path(), y in step_path()) {
        let (j, _) = x.jump_counts();
        let (l, _) = y.jump_counts();
        prop_assume!(l < j);
        let jth = x.up_sizes_desc()[j as usize - 1];
        prop_assert!(j1_distance(&x, &y, TOL).unwrap() >= jth / 2.0 - TOL);
    }
}
