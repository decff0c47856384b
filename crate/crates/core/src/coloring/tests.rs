use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::coarse::{cover_multiplicity_at, Window};

fn line(lo: i64, hi: i64) -> Window {
    Window::lattice(&[lo], &[hi], Scale::ZERO).unwrap()
}

fn square(lo: i64, hi: i64) -> Window {
    Window::lattice(&[lo, lo], &[hi, hi], Scale::ZERO).unwrap()
}

fn color_by(w: &Window, n: u32, mut f: impl FnMut(&[i64]) -> u32) -> Coloring {
    Coloring::from_fn(w.len(), n, &w.core(), |p| f(&w.coords(p))).unwrap()
}

/// Widest pair joined by a monochrome chain, by explicit search over pairs.
fn chain_oracle(space: &dyn Space, chi: &Coloring, r: Scale) -> Scale {
    let pts: Vec<PointId> = chi.domain().iter().collect();
    let mut best = Scale::ZERO;
    for &start in &pts {
        let c = chi.get(start);
        let mut seen = vec![false; space.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            best = best.max(space.dist(start, x));
            for &y in &pts {
                if !seen[y] && chi.get(y) == c && space.dist(x, y) <= r {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    best
}

#[test]
fn blocks_of_five() {
    let w = line(0, 29);
    let chi = color_by(&w, 1, |c| ((c[0] / 5) % 2) as u32);
    assert_eq!(max_mono_component_diameter(&w, &chi, Scale::int(1)), Scale::int(4));
    let cover = coloring_to_cover(&w, &chi, Scale::int(1));
    assert_eq!(cover.len(), 6);
    assert!(cover.parts().iter().all(|p| p.points.len() == 5));
    assert_eq!(mesh(&w, &cover).unwrap(), Scale::int(4));
}

#[test]
fn constant_coloring_is_one_component() {
    let w = Window::lattice(&[0, 0], &[6, 4], Scale::int(1)).unwrap();
    let chi = color_by(&w, 0, |_| 0);
    assert_eq!(max_mono_component_diameter(&w, &chi, Scale::int(1)), Scale::int(4));
    assert_eq!(coloring_to_cover(&w, &chi, Scale::int(1)).len(), 1);
}

#[test]
fn random_three_colorings_match_chain_oracle() {
    let w = square(0, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in [1, 2] {
        for _ in 0..5 {
            let chi = color_by(&w, 2, |_| rng.random_range(0..3));
            let r = Scale::int(r);
            assert_eq!(max_mono_component_diameter(&w, &chi, r), chain_oracle(&w, &chi, r));
        }
    }
}

#[test]
fn cover_round_trip() {
    let w = square(0, 9);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for r in [1, 2, 3] {
        let chi = color_by(&w, 3, |_| rng.random_range(0..4));
        let cover = coloring_to_cover(&w, &chi, Scale::int(r));
        let back = cover_to_coloring(&w, &cover).unwrap();
        for p in w.core().iter() {
            assert_eq!(back.get(p), chi.get(p));
        }
        let comps: usize = (0..4).map(|c| components(&w, &chi.class(c), Scale::int(r)).len()).sum();
        assert_eq!(cover.len(), comps);
        assert_eq!(mesh(&w, &cover).unwrap(), max_mono_component_diameter(&w, &chi, Scale::int(r)));
    }
}

#[test]
fn separated_interval_families() {
    let w = line(0, 19);
    let parts = (0..4)
        .map(|k| Part { label: format!("I{k}"), points: w.select(|c| c[0] / 5 == k), family: Some((k % 2) as usize) })
        .collect();
    let cover = Cover::new(parts).unwrap();
    let chi = cover_to_coloring(&w, &cover).unwrap();
    assert_eq!(chi.n(), 1);
    assert_eq!(max_mono_component_diameter(&w, &chi, Scale::int(1)), mesh(&w, &cover).unwrap());
}

#[test]
fn brick_cover_three_families() {
    let w = square(0, 15);
    // bricks of width 4 and height 2, odd rows shifted by 2; the bricks form a
    // triangular lattice, coloured by its standard 3-colouring
    let mut parts = Vec::new();
    for row in 0..8i64 {
        for k in -1..5i64 {
            let u = 2 * k + row % 2;
            let x0 = 2 * u;
            let pts = w.select(|c| c[1] / 2 == row && c[0] >= x0 && c[0] < x0 + 4);
            if !pts.is_empty() {
                parts.push(Part {
                    label: format!("{row}.{k}"),
                    points: pts,
                    family: Some(((u + 3 * row) / 2).rem_euclid(3) as usize),
                });
            }
        }
    }
    let cover = Cover::new(parts).unwrap();
    let chi = cover_to_coloring(&w, &cover).unwrap();
    assert_eq!(chi.n(), 2);
    let d = max_mono_component_diameter(&w, &chi, Scale::int(1));
    assert!(d <= mesh(&w, &cover).unwrap());
    assert_eq!(d, chain_oracle(&w, &chi, Scale::int(1)));
}

#[test]
fn uncovered_core_point_is_rejected() {
    let w = line(0, 9);
    let cover = Cover::new(vec![Part { label: "a".into(), points: w.select(|c| c[0] < 5), family: Some(0) }]).unwrap();
    assert!(matches!(cover_to_coloring(&w, &cover), Err(Error::Input(_))));
    let unlabelled = Cover::from_sets(vec![w.core()]);
    assert!(cover_to_coloring(&w, &unlabelled).is_err());
}

#[test]
fn multiplicity_on_decades() {
    let w = line(0, 59);
    let cover = Cover::from_sets((0..6).map(|k| w.select(|c| c[0] / 10 == k)).collect());
    let out = multiplicity_to_coloring(&w, &cover, Scale::int(1), 1).unwrap();
    assert_eq!(out.bound, Scale::int(11));
    assert!(out.holds());
    assert!(out.measured <= Scale::int(11));
    assert_eq!(out.coloring.certified(), Some(Certificate { r: Scale::int(1), d: Scale::int(11) }));
}

#[test]
fn multiplicity_single_part() {
    let w = square(0, 5);
    let cover = Cover::from_sets(vec![w.core()]);
    let out = multiplicity_to_coloring(&w, &cover, Scale::int(1), 2).unwrap();
    assert!(out.coloring.domain().iter().all(|p| out.coloring.get(p) == Some(0)));
    assert_eq!(out.bound, Scale::int(5 + 3));
    assert!(out.holds());
}

#[test]
fn multiplicity_precondition() {
    let w = line(0, 19);
    let cover = Cover::from_sets((0..10).map(|k| w.select(|c| c[0] / 2 == k)).collect());
    // radius-4 balls meet up to five parts of width 2
    let err = multiplicity_to_coloring(&w, &cover, Scale::int(2), 1).unwrap_err();
    assert!(matches!(err, Error::Input(_)));
}

#[test]
fn multiplicity_bound_can_fail_at_full_palette() {
    // parts of width 4 meet every 2-ball at most twice, yet every point sees
    // two parts at radius 2 and takes colour 1, so the whole line is one
    // monochrome component
    let w = Window::lattice(&[-40], &[79], Scale::int(2)).unwrap();
    let cover = Cover::from_sets((-10..20).map(|k| w.select(|c| c[0].div_euclid(4) == k)).collect());
    let (m, _) = cover_multiplicity_at(&w, &cover, Scale::int(2)).unwrap();
    assert!(m <= 2);
    let out = multiplicity_to_coloring(&w, &cover, Scale::int(1), 1).unwrap();
    assert!(out.coloring.domain().iter().all(|p| out.coloring.get(p) == Some(1)));
    assert_eq!(out.bound, Scale::int(5));
    assert_eq!(out.measured, Scale::int(115));
    assert!(!out.holds());
    assert!(out.coloring.certified().is_none());
    assert!(out.witness.is_some());
}

#[test]
fn merge_evens_and_odds() {
    let w = line(0, 19);
    let r = Scale::int(1);
    let mut a = Coloring::from_fn(w.len(), 0, &w.select(|c| c[0] % 2 == 0), |_| 0).unwrap();
    let odds = w.select(|c| c[0] % 2 == 1);
    let mut b = Coloring::from_fn(w.len(), 1, &odds, |p| ((w.coords(p)[0] / 2) % 2) as u32).unwrap();
    a.certify(&w, r, Scale::ZERO).unwrap();
    assert!(merge_colorings(&w, &a, &b, r).is_err());
    // odd points of one colour are 4 apart, so they are isolated at scale 2r
    b.certify(&w, Scale::int(2), Scale::ZERO).unwrap();
    let m = merge_colorings(&w, &a, &b, r).unwrap();
    assert_eq!(m.certified().unwrap().d, Scale::int(2));
    assert!(max_mono_component_diameter(&w, &m, r) <= Scale::int(2));
}

#[test]
fn merge_line_and_plane() {
    let w = square(-20, 20);
    let r = Scale::int(1);
    let line = w.select(|c| c[1] == 0);
    let rest = w.core().difference(&line);
    let mut a = Coloring::from_fn(w.len(), 1, &line, |p| w.coords(p)[0].div_euclid(5).rem_euclid(2) as u32).unwrap();
    a.certify(&w, r, Scale::int(4)).unwrap();
    let mut b = Coloring::from_fn(w.len(), 3, &rest, |p| {
        let c = w.coords(p);
        (c[0].div_euclid(7).rem_euclid(2) * 2 + c[1].div_euclid(7).rem_euclid(2)) as u32
    })
    .unwrap();
    b.certify(&w, Scale::int(6), Scale::int(6)).unwrap();
    let m = merge_colorings(&w, &a, &b, r).unwrap();
    assert_eq!(m.certified().unwrap().d, Scale::int(16));
    assert_eq!(m.n(), 3);
    assert!(max_mono_component_diameter(&w, &m, r) <= Scale::int(16));
    assert!(merge_colorings(&w, &a, &a, r).is_err());
}

#[test]
fn bound_arithmetic() {
    let w = line(0, 0);
    let mut a = Coloring::new(w.len(), 0);
    let mut b = Coloring::new(w.len(), 0);
    a.certify(&w, Scale::int(1), Scale::int(4)).unwrap();
    b.certify(&w, Scale::int(6), Scale::int(6)).unwrap();
    let m = merge_colorings(&w, &a, &b, Scale::int(1)).unwrap();
    assert_eq!(m.certified().unwrap().d, Scale::int(16));
}

#[test]
fn oracle_examples() {
    let cfg = OracleConfig::default();
    let w = line(0, 19);
    let ans = asdim_oracle(&w, Scale::int(1), 1, Scale::int(9), &cfg).unwrap();
    let OracleAnswer::Colorable(chi) = ans else { panic!("expected a witness") };
    assert!(max_mono_component_diameter(&w, &chi, Scale::int(1)) <= Scale::int(9));

    let small = Window::lattice(&[0, 0], &[1, 2], Scale::ZERO).unwrap();
    let ans = asdim_oracle(&small, Scale::int(1), 5, Scale::ZERO, &cfg).unwrap();
    assert!(ans.is_colorable());

    let sq = square(0, 7);
    let ans = asdim_oracle(&sq, Scale::int(1), 0, Scale::int(6), &cfg).unwrap();
    assert_eq!(ans, OracleAnswer::NotColorable { component: sq.core() });
}

#[test]
fn oracle_checkerboard_and_refusal() {
    let w = square(0, 5);
    let cfg = OracleConfig::default();
    // four colours separate king neighbours
    assert!(asdim_oracle(&w, Scale::int(1), 3, Scale::ZERO, &cfg).unwrap().is_colorable());
    assert!(!asdim_oracle(&w, Scale::int(1), 2, Scale::ZERO, &cfg).unwrap().is_colorable());
    let tiny = OracleConfig { max_search: 10 };
    let big = square(0, 30);
    let err = asdim_oracle(&big, Scale::int(2), 1, Scale::int(3), &tiny).unwrap_err();
    assert!(matches!(err, Error::Refused(_)));
}

#[test]
fn profile_search_agrees_with_backtracking() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let wdt = rng.random_range(2..6);
        let hgt = rng.random_range(2..7);
        let w = Window::lattice(&[0, 0], &[wdt, hgt], Scale::ZERO).unwrap();
        let keep: PointSet = (0..w.len()).filter(|_| rng.random_bool(0.8)).collect();
        let comps = components(&w, &keep, Scale::int(1));
        let n = rng.random_range(0..2);
        let d = Scale::int(rng.random_range(0..4));
        for comp in comps {
            let prof = Profile::new(&w, &comp, Scale::int(1), n, d).unwrap();
            let a = prof.run(n, 1 << 22);
            let b = Backtrack::new(&w, &comp, Scale::int(1), n, d).run(1 << 22);
            match (a, b) {
                (Outcome::Found(ca), Outcome::Found(_)) => {
                    let chi = Coloring::from_fn(w.len(), n, &comp, |p| ca[comp.as_slice().binary_search(&p).unwrap()])
                        .unwrap();
                    assert!(max_mono_component_diameter(&w, &chi, Scale::int(1)) <= d);
                }
                (Outcome::Impossible, Outcome::Impossible) => {}
                _ => panic!("searches disagree"),
            }
        }
    }
}

#[test]
fn json_round_trip() {
    let w = square(0, 4);
    let mut chi = color_by(&w, 1, |c| ((c[0] / 2) % 2) as u32);
    chi.certify(&w, Scale::int(1), Scale::int(4)).unwrap();
    let v = chi.to_json(&w);
    assert_eq!(Coloring::from_json(&w, &v).unwrap(), chi);
    let mut forged = v.clone();
    forged["certified"]["d"] = serde_json::json!(0);
    assert!(Coloring::from_json(&w, &forged).is_err());
}
