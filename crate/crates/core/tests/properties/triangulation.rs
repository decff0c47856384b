use coarsekit::scale::{q, Q};
use coarsekit::triangulation::{
    b_affine_eval, b_affine_invert, bary_star_membership, kuhn_simplices, locate_simplex, std_star_membership,
    BAffineMap, KuhnComplex, Simplex, StdSimplex,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational(lo: i128, hi: i128) -> impl Strategy<Value = Q> {
    (1i128..50).prop_flat_map(move |den| (lo * den..=hi * den).prop_map(move |num| q(num, den)))
}

/// Positive weights summing to 1.
fn interior_weights(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(1i128..40, n + 1).prop_map(|raw| {
        let total: i128 = raw.iter().sum();
        raw.into_iter().map(|v| q(v, total)).collect()
    })
}

/// Nonnegative weights summing to 1, possibly on a face.
fn weights(n: usize) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(0i128..6, n + 1).prop_map(|mut raw| {
        if raw.iter().all(|&v| v == 0) {
            raw[0] = 1;
        }
        let total: i128 = raw.iter().sum();
        raw.into_iter().map(|v| q(v, total)).collect()
    })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..=n).collect::<Vec<_>>()).prop_shuffle()
}

fn base_simplex(n: usize) -> impl Strategy<Value = Simplex> {
    let all = kuhn_simplices(n).unwrap();
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn located_simplex_contains_the_point(
        n in 1usize..=4,
        coords in proptest::collection::vec(rational(-30, 30), 4),
        inv in (1i128..9, 1i128..9),
    ) {
        let k = KuhnComplex::new(n, q(inv.0, inv.1)).unwrap();
        let x = &coords[..n];
        let s = locate_simplex(&k, x).unwrap();
        prop_assert!(s.barycentric(x).iter().all(|w| *w >= Q::zero()));
    }

    #[test]
    fn stars_partition_the_simplex((n, x) in (1usize..=3).prop_flat_map(|n| (Just(n), weights(n)))) {
        prop_assert!(StdSimplex::new(n).contains(&x));
        let holders: Vec<usize> = (0..=n).filter(|&i| std_star_membership(n, i, &x).unwrap()).collect();
        prop_assert!(!holders.is_empty());
        let b = StdSimplex::new(n).barycenter();
        prop_assert_eq!(holders.len() == n + 1, x == b);
    }

    #[test]
    fn b_affine_round_trip(
        sigma in base_simplex(2),
        bp in interior_weights(2),
        corr in permutation(2),
        x in weights(2),
    ) {
        let b_prime = sigma.combination(&bp);
        let m = BAffineMap::new(sigma, b_prime.clone(), corr).unwrap();
        let y = b_affine_eval(&m, &x).unwrap();
        prop_assert_eq!(b_affine_invert(&m, &y).unwrap(), x);
        prop_assert_eq!(b_affine_eval(&m, &StdSimplex::new(2).barycenter()).unwrap(), b_prime);
    }

    #[test]
    fn b_affine_round_trip_in_three_dimensions(
        sigma in base_simplex(3),
        bp in interior_weights(3),
        corr in permutation(3),
        x in weights(3),
    ) {
        let m = BAffineMap::new(sigma.clone(), sigma.combination(&bp), corr).unwrap();
        prop_assert_eq!(b_affine_invert(&m, &b_affine_eval(&m, &x).unwrap()).unwrap(), x);
    }

    #[test]
    fn star_membership_ignores_correspondence(
        sigma in base_simplex(2),
        bp in interior_weights(2),
        c1 in permutation(2),
        c2 in permutation(2),
        yw in weights(2),
    ) {
        let b_prime = sigma.combination(&bp);
        let y = sigma.combination(&yw);
        let m1 = BAffineMap::new(sigma.clone(), b_prime.clone(), c1).unwrap();
        let m2 = BAffineMap::new(sigma, b_prime, c2).unwrap();
        for v in 0..=2 {
            prop_assert_eq!(bary_star_membership(&m1, v, &y), bary_star_membership(&m2, v, &y));
        }
        prop_assert!((0..=2).any(|v| bary_star_membership(&m1, v, &y)));
    }
}

#[test]
fn kuhn_volumes_sum_to_one() {
    for n in 1..=4 {
        let total: Q = kuhn_simplices(n).unwrap().iter().map(Simplex::volume).sum();
        assert_eq!(total, Q::one());
    }
}
