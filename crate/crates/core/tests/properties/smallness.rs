use coarsekit::coarse::neighborhood;
use coarsekit::smallness::{nonsmall_certificate, phi_table, phi_witness, small_verdict, PhiTable, Verdict};
use coarsekit::{PointSet, Scale, Space, Window};
use proptest::prelude::*;

fn square(h: i64, margin: u32) -> Window {
    Window::lattice(&[-h, -h], &[h, h], Scale::int(margin)).unwrap()
}

fn sparse_set(w: &Window, bits: &[u8], density: u8) -> PointSet {
    (0..w.len()).filter(|&p| bits[p % bits.len()] < density).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn phi_is_monotone(bits in proptest::collection::vec(any::<u8>(), 1..300), density in 0u8..80) {
        let w = square(9, 6);
        let a = sparse_set(&w, &bits, density);
        let mut last: Option<Scale> = None;
        for d in 0..=3 {
            let budget = Scale::int(6 - d);
            match phi_witness(&w, &a, Scale::int(d), budget).unwrap() {
                Some(phi) => {
                    prop_assert!(phi >= Scale::int(d));
                    if let Some(prev) = last {
                        prop_assert!(prev <= phi);
                    }
                    last = Some(phi);
                }
                None => last = None,
            }
        }
    }

    #[test]
    fn verdicts_are_exclusive(bits in proptest::collection::vec(any::<u8>(), 1..300), density in 0u8..255) {
        let w = square(8, 5);
        let a = sparse_set(&w, &bits, density);
        let deltas = [Scale::int(1), Scale::int(2)];
        let phi_max = Scale::int(3);
        let table = phi_table(&w, &a, &deltas, phi_max).ok();
        let cert = nonsmall_certificate(&w, &a, &deltas).unwrap();
        prop_assert!(!(table.is_some() && cert.is_some()));
        match small_verdict(&w, &a, &deltas, phi_max).unwrap() {
            Verdict::SmallAtTestedScales(t) => {
                prop_assert!(t.verify(&w, &a).unwrap());
                prop_assert_eq!(Some(t), table);
            }
            Verdict::NotSmall(c) => {
                prop_assert!(c.holds(&w, &a));
                prop_assert!(table.is_none());
            }
            Verdict::Inconclusive(_) => prop_assert!(table.is_none() && cert.is_none()),
        }
    }

    #[test]
    fn union_of_lines_is_small(c1 in -6i64..=6, c2 in -6i64..=6, vertical in any::<bool>(), delta in 1u32..3) {
        let w = square(14, 9);
        let on = |c: &[i64], k: i64| if vertical { c[0] == k } else { c[1] == k };
        let a = w.select(|c| on(c, c1));
        let b = w.select(|c| on(c, c2));
        let d = Scale::int(delta);
        let phi_max = Scale::int(9 - delta);
        let pa = phi_witness(&w, &a, d, phi_max).unwrap();
        let pb = phi_witness(&w, &b, d, phi_max).unwrap();
        prop_assert!(pa.is_some() && pb.is_some());
        prop_assert!(phi_witness(&w, &a.union(&b), d, phi_max).unwrap().is_some());
    }

    #[test]
    fn thickening_keeps_smallness(bits in proptest::collection::vec(any::<u8>(), 1..300), density in 0u8..40, s in 0u32..3, delta in 0u32..3) {
        let w = square(9, 8);
        let a = sparse_set(&w, &bits, density);
        let budget = Scale::int(8 - delta - s);
        if let Some(phi) = phi_witness(&w, &a, Scale::int(delta + s), budget).unwrap() {
            let thick = neighborhood(&w, &a, Scale::int(s));
            let got = phi_witness(&w, &thick, Scale::int(delta), budget).unwrap();
            prop_assert!(got.is_some_and(|g| g <= phi), "{got:?} vs {phi}");
        }
    }

    #[test]
    fn phi_tables_round_trip(entries in proptest::collection::vec((0u32..20, 0u32..10), 0..8)) {
        let mut t = PhiTable::new();
        let mut sorted = entries.clone();
        sorted.sort();
        let mut acc = 0;
        for (d, extra) in sorted {
            acc = acc.max(d) + extra;
            let _ = t.insert(Scale::int(d), Scale::int(acc));
        }
        prop_assert_eq!(PhiTable::from_json(&t.to_json()).unwrap(), t);
    }
}
