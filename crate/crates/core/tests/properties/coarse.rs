use coarsekit::coarse::{
    check_coarse_map, components, cover_multiplicity_at, neighborhood, CoarseMapCheck, Cover, Part,
};
use coarsekit::{PointSet, Scale, Space};
use proptest::prelude::*;

use crate::{closure_components, slice_strategy, window_strategy};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn balls_grow_with_radius(w in window_strategy(8, 3), r in 0u32..5, extra in 0u32..4, seed in any::<usize>()) {
        let x = seed % w.len();
        let small = w.ball(x, Scale::int(r));
        let large = w.ball(x, Scale::int(r + extra));
        prop_assert!(PointSet::new(small).is_subset(&PointSet::new(large)));
    }

    #[test]
    fn neighbourhoods_compose(s in slice_strategy(8, 2), r in 0u32..3, t in 0u32..3) {
        let twice = neighborhood(&s.w, &neighborhood(&s.w, &s.set, Scale::int(r)), Scale::int(t));
        let once = neighborhood(&s.w, &s.set, Scale::int(r + t));
        prop_assert!(twice.is_subset(&once));
    }

    #[test]
    fn components_match_transitive_closure(s in slice_strategy(11, 0), r in 0u32..4) {
        prop_assume!(s.w.len() <= 200);
        let mut ours: Vec<Vec<usize>> = components(&s.w, &s.set, Scale::int(r))
            .into_iter()
            .map(|c| c.iter().collect())
            .collect();
        let mut oracle = closure_components(&s.w, &s.set, Scale::int(r));
        ours.sort();
        oracle.sort();
        prop_assert_eq!(ours, oracle);
    }

    #[test]
    fn multiplicity_ignores_labels_and_order(
        w in window_strategy(7, 0),
        seeds in proptest::collection::vec(any::<u64>(), 2..6),
        r in 0u32..3,
        rot in any::<usize>(),
    ) {
        // part k takes the points whose hash under seed k is small, plus a
        // stripe so the core stays covered
        let k = seeds.len();
        let sets: Vec<PointSet> = seeds
            .iter()
            .enumerate()
            .map(|(i, seed)| {
                (0..w.len())
                    .filter(|&p| p % k == i || (seed.rotate_left(p as u32 % 64) & 3) == 0)
                    .collect()
            })
            .collect();
        let plain = Cover::from_sets(sets.clone());
        let mut parts: Vec<Part> = sets
            .into_iter()
            .enumerate()
            .map(|(i, points)| Part { label: format!("relabelled-{}", 7 * i + 3), points, family: None })
            .collect();
        parts.rotate_left(rot % k);
        parts.reverse();
        let shuffled = Cover::new(parts).unwrap();
        let (m1, _) = cover_multiplicity_at(&w, &plain, Scale::int(r)).unwrap();
        let (m2, _) = cover_multiplicity_at(&w, &shuffled, Scale::int(r)).unwrap();
        prop_assert_eq!(m1, m2);
    }

    #[test]
    fn identity_is_a_coarse_map(w in window_strategy(7, 2), s in 0u32..5) {
        let id = CoarseMapCheck::from_fn(&w, Some).with_modulus(&[(Scale::int(s), Scale::int(s))]);
        let rep = check_coarse_map(&w, &w, &id);
        prop_assert!(rep.passed);
    }
}
