use std::collections::BTreeMap;

use coarsekit::cayley::{
    cayley_ball, subgroup_trace, transfer_coloring, Element, GroupSpec, GroupWindow, MAX_GROUP_WINDOW,
};
use coarsekit::coloring::{max_mono_component_diameter, Coloring};
use coarsekit::{PointSet, Scale, Space};
use proptest::prelude::*;

fn group() -> impl Strategy<Value = GroupSpec> {
    prop_oneof![
        (1usize..4).prop_map(GroupSpec::FreeAbelian),
        (1usize..4).prop_map(GroupSpec::Free),
        (2u32..5).prop_map(GroupSpec::Lamplighter),
    ]
}

fn word(g: GroupSpec, picks: &[usize]) -> Element {
    let gens = g.generators();
    picks.iter().fold(g.identity(), |x, &i| g.multiply(&x, &gens[i % gens.len()]))
}

fn picks(max: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(any::<usize>(), 0..max)
}

/// Lamp configuration as a map from site to state, applied literally.
fn lamp_product(m: u32, x: &Element, y: &Element) -> Element {
    let (Element::Lamps { lamps: a, pos: n }, Element::Lamps { lamps: b, pos: k }) = (x, y) else { unreachable!() };
    let sites: Vec<i64> = a.keys().map(|i| i - k).chain(b.keys().copied()).collect();
    let mut lamps = BTreeMap::new();
    for i in sites {
        let v = (a.get(&(i + k)).copied().unwrap_or(0) + b.get(&i).copied().unwrap_or(0)) % m;
        if v != 0 {
            lamps.insert(i, v);
        }
    }
    Element::Lamps { lamps, pos: n + k }
}

fn ball(g: GroupSpec, r: u64) -> GroupWindow {
    cayley_ball(g, r, 0, MAX_GROUP_WINDOW).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn word_metric_is_left_invariant(g in group(), px in picks(12), py in picks(12), pz in picks(12)) {
        let [x, y, z] = [&px, &py, &pz].map(|p| word(g, p));
        prop_assert_eq!(g.distance(&g.multiply(&z, &x), &g.multiply(&z, &y)), g.distance(&x, &y));
        prop_assert!(g.word_length(&x) <= px.len() as u64);
    }

    #[test]
    fn lamplighter_product_formula(m in 2u32..6, px in picks(20), py in picks(20)) {
        let g = GroupSpec::Lamplighter(m);
        let (x, y) = (word(g, &px), word(g, &py));
        prop_assert_eq!(g.multiply(&x, &y), lamp_product(m, &x, &y));
    }

    #[test]
    fn traces_are_closed_under_products(g in group(), sub in picks(4), r in 2u64..4) {
        let w = ball(g, r);
        let s = word(g, &sub);
        prop_assume!(s != g.identity());
        let trace = subgroup_trace(&w, std::slice::from_ref(&s)).unwrap();
        for x in trace.iter() {
            for step in [s.clone(), g.inverse(&s)] {
                if let Some(y) = w.product(x, &step) {
                    prop_assert!(trace.contains(y));
                }
            }
        }
    }

    #[test]
    fn transfer_keeps_certificates(g in group(), base in picks(2), colors in proptest::collection::vec(0u32..2, 64)) {
        let h = ball(g, 2);
        let w = ball(g, 3);
        let mut chi = Coloring::from_fn(h.len(), 1, &PointSet::new((0..h.len()).collect()), |p| colors[p % colors.len()]).unwrap();
        let r = Scale::int(1);
        let d = max_mono_component_diameter(&h, &chi, r);
        chi.certify(&h, r, d).unwrap();
        let x0e = word(g, &base[..base.len().min(1)]);
        let x0 = w.id_of(&x0e).unwrap();
        // F = x₀ · B(1), which is 1-connected
        let unit = ball(g, 1);
        let f: PointSet = (0..unit.len()).map(|p| w.id_of(&g.multiply(&x0e, unit.element(p))).unwrap()).collect();
        let moved = transfer_coloring(&h, &chi, &w, &f, x0, r).unwrap();
        prop_assert_eq!(moved.certified(), chi.certified());
        prop_assert!(max_mono_component_diameter(&w, &moved, r) <= d);
    }
}

#[test]
fn lattice_ball_counts() {
    for n in 1..=3usize {
        for r in 0..=4u64 {
            let w = ball(GroupSpec::FreeAbelian(n), r);
            let ri = r as i64;
            let count = (0..(2 * ri + 1).pow(n as u32))
                .filter(|&code| {
                    let mut c = code;
                    let mut norm = 0;
                    for _ in 0..n {
                        norm += (c % (2 * ri + 1) - ri).abs();
                        c /= 2 * ri + 1;
                    }
                    norm <= ri
                })
                .count();
            assert_eq!(w.len(), count);
        }
    }
}
