use coarsekit::coloring::{
    asdim_oracle, coloring_to_cover, cover_to_coloring, max_mono_component_diameter, merge_colorings, Coloring,
    OracleAnswer, OracleConfig,
};
use coarsekit::{PointSet, Scale, Space, Window};
use proptest::prelude::*;

use crate::{closure_components, window_strategy};

/// Widest monochrome component by the closure oracle.
fn oracle_width(w: &dyn Space, chi: &Coloring, r: Scale) -> Scale {
    let mut best = Scale::ZERO;
    for c in 0..=chi.n() {
        for comp in closure_components(w, &chi.class(c), r) {
            best = best.max(w.set_diameter(&comp));
        }
    }
    best
}

fn colored_window() -> impl Strategy<Value = (Window, u32, Vec<u32>)> {
    (window_strategy(7, 1), 0u32..3).prop_flat_map(|(w, n)| {
        let len = w.len();
        (Just(w), Just(n), proptest::collection::vec(0..=n, len))
    })
}

fn coloring_of(w: &Window, n: u32, colors: &[u32], domain: &PointSet) -> Coloring {
    Coloring::from_fn(w.len(), n, domain, |p| colors[p]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn certificates_are_sound((w, n, colors) in colored_window(), r in 0u32..3) {
        let r = Scale::int(r);
        let mut chi = coloring_of(&w, n, &colors, &w.core());
        let measured = max_mono_component_diameter(&w, &chi, r);
        prop_assert_eq!(measured, oracle_width(&w, &chi, r));
        if measured > Scale::ZERO {
            prop_assert!(chi.certify(&w, r, measured - Scale::ratio(1, 2)).is_err());
        }
        chi.certify(&w, r, measured).unwrap();
        let back = Coloring::from_json(&w, &chi.to_json(&w)).unwrap();
        prop_assert_eq!(back.certified(), chi.certified());
        for p in 0..w.len() {
            prop_assert_eq!(back.get(p), chi.get(p));
        }
    }

    #[test]
    fn cover_round_trip((w, n, colors) in colored_window(), r in 0u32..3) {
        let chi = coloring_of(&w, n, &colors, &w.core());
        let cover = coloring_to_cover(&w, &chi, Scale::int(r));
        let again = cover_to_coloring(&w, &cover).unwrap();
        for p in w.core().iter() {
            prop_assert_eq!(again.get(p), chi.get(p));
        }
    }

    #[test]
    fn oracle_palette_is_monotone(len in 2i64..9, rows in 0i64..2, r in 1u32..3, n in 0u32..2, d in 0u32..4) {
        let w = Window::lattice(&[0, 0], &[len, rows], Scale::ZERO).unwrap();
        let cfg = OracleConfig::default();
        let (r, d) = (Scale::int(r), Scale::int(d));
        let yes = asdim_oracle(&w, r, n, d, &cfg).unwrap();
        if let OracleAnswer::Colorable(chi) = &yes {
            prop_assert!(oracle_width(&w, chi, r) <= d);
            prop_assert!(asdim_oracle(&w, r, n + 1, d, &cfg).unwrap().is_colorable());
            prop_assert!(asdim_oracle(&w, r, n, d + Scale::int(1), &cfg).unwrap().is_colorable());
        }
    }

    #[test]
    fn merged_bound_holds(
        side in 6i64..11,
        cut in proptest::collection::vec(any::<bool>(), 121),
        block_a in 1i64..4,
        block_b in 1i64..3,
    ) {
        let w = Window::lattice(&[0, 0], &[side, side], Scale::ZERO).unwrap();
        let r = Scale::int(1);
        let a: PointSet = (0..w.len()).filter(|&p| cut[p % cut.len()]).collect();
        let b = w.core().difference(&a);
        let block = |p: usize, s: i64, m: i64| {
            let c = w.coords(p);
            ((c[0] / s).rem_euclid(m) * m + (c[1] / s).rem_euclid(m)) as u32
        };
        let mut chi_a = Coloring::from_fn(w.len(), 3, &a, |p| block(p, block_a, 2)).unwrap();
        let da = max_mono_component_diameter(&w, &chi_a, r);
        chi_a.certify(&w, r, da).unwrap();
        let rb = r * 2 + da;
        let m = (rb.value().to_integer() as i64 / block_b) + 2;
        let mut chi_b = Coloring::from_fn(w.len(), (m * m - 1) as u32, &b, |p| block(p, block_b, m)).unwrap();
        let db = max_mono_component_diameter(&w, &chi_b, rb);
        chi_b.certify(&w, rb, db).unwrap();
        let merged = merge_colorings(&w, &chi_a, &chi_b, r).unwrap();
        let bound = da * 2 + r * 2 + db;
        prop_assert!(oracle_width(&w, &merged, r) <= bound);
        for p in w.core().iter() {
            prop_assert!(merged.get(p).is_some());
        }
    }
}
