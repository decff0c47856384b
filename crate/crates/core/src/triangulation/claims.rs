//! Exhaustive checks of the star-neighbourhood containments on rational probes.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::baffine::{in_half_simplex, weight_grid, BAffineMap, LipschitzBound};
use super::linalg::{polytope_nonempty, sup_dist, Matrix};
use super::simplex::{Point, Simplex, StdSimplex};
use crate::error::{input, Result};
use crate::scale::{qi, serde_q, Scale, Q};

/// Which rational points to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    /// Every point whose barycentric weights are multiples of `1/denominator`.
    Grid { denominator: u32 },
    /// `count` points with weights in `(1/denominator)ℤ`, drawn uniformly by
    /// rejection from a seeded generator.
    Sample { count: usize, denominator: u32, seed: u64 },
}

impl Probe {
    /// Barycentric weight vectors for an `n`-simplex.
    pub fn weights(&self, n: usize) -> Result<Vec<Vec<Q>>> {
        match *self {
            Probe::Grid { denominator } if denominator > 0 => Ok(weight_grid(n, denominator)),
            Probe::Sample { count, denominator, seed } if denominator > 0 => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let d = denominator as i128;
                let mut out = Vec::with_capacity(count);
                while out.len() < count {
                    let head: Vec<i128> = (0..n).map(|_| rng.random_range(0..=d)).collect();
                    let s: i128 = head.iter().sum();
                    if s > d {
                        continue;
                    }
                    let mut w: Vec<Q> = head.into_iter().map(|k| Q::new(k, d)).collect();
                    w.push(Q::new(d - s, d));
                    out.push(w);
                }
                Ok(out)
            }
            _ => input("probe denominator must be positive"),
        }
    }
}

/// Whether `x ∈ Δ` is within sup-distance `t` of the star of vertex `i`.
///
/// With `z(i) = s` fixed, the other coordinates range independently over
/// `[max(0, x_k − t), min(s, x_k + t)]`; the best `s` is the largest allowed.
pub fn near_std_star(x: &[Q], i: usize, t: Q) -> bool {
    let others = || x.iter().enumerate().filter(move |&(k, _)| k != i).map(|(_, v)| *v);
    let zero = Q::zero();
    let lo = others().map(|v| v - t).fold((x[i] - t).max(zero), Q::max);
    let hi = (x[i] + t).min(Q::one());
    let hi2 = Q::one() - others().map(|v| (v - t).max(zero)).sum::<Q>();
    let s = hi.min(hi2);
    s >= lo && s + others().map(|v| s.min(v + t)).sum::<Q>() >= Q::one()
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim4Report {
    pub n: usize,
    pub eps: Scale,
    pub probes: usize,
    /// Probes within `ε` of every star.
    pub near_all: usize,
    /// Largest `‖x − b_Δ‖` among those, as a multiple of `ε`.
    #[serde(with = "serde_q")]
    pub worst_ratio: Q,
    #[serde(serialize_with = "ser_points")]
    pub violators: Vec<Point>,
}

impl Claim4Report {
    pub fn holds(&self) -> bool {
        self.violators.is_empty()
    }
}

fn ser_points<S: serde::Serializer>(v: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for p in v {
        seq.serialize_element(&p.iter().map(|x| crate::scale::QJson(*x)).collect::<Vec<_>>())?;
    }
    seq.end()
}

/// Checks that points of `Δ` within `ε` of all `n+1` stars lie within `nε`
/// of the barycenter.
pub fn claim4_check(n: usize, eps: Scale, probe: &Probe) -> Result<Claim4Report> {
    let e = eps.value();
    if !e.is_positive() {
        return input("ε must be positive");
    }
    let pts = probe.weights(n)?;
    let b = StdSimplex::new(n).barycenter();
    let bound = e * qi(n as i128);
    let near: Vec<(Point, Q)> = pts
        .par_iter()
        .filter(|x| (0..=n).all(|i| near_std_star(x, i, e)))
        .map(|x| (x.clone(), sup_dist(x, &b)))
        .collect();
    let worst = near.iter().map(|(_, d)| *d).max().unwrap_or_else(Q::zero) / e;
    let violators = near.iter().filter(|(_, d)| *d > bound).map(|(x, _)| x.clone()).collect();
    Ok(Claim4Report { n, eps, probes: pts.len(), near_all: near.len(), worst_ratio: worst, violators })
}

/// Exact test of `dist(y, St′_{σ,b′}(v_i)) ≤ ε`, where `i` indexes `Δ`'s
/// vertices. The star is the union over `j ≠ i` of the images of
/// `{x ∈ Δ : x_i max, x_j min}` under the `j`-th affine piece.
pub fn near_perturbed_star(m: &BAffineMap, i: usize, y: &[Q], eps: Q) -> bool {
    let n = m.simplex().dim();
    let bd = Q::new(1, n as i128 + 1);
    let eq: Matrix = vec![vec![Q::one(); n + 1]];
    let eq_rhs = [Q::one()];
    (0..=n).filter(|&j| j != i).any(|j| {
        let mut a: Matrix = Vec::new();
        let mut b: Vec<Q> = Vec::new();
        let unit = |k: usize, s: Q| -> Vec<Q> { (0..=n).map(|c| if c == k { s } else { Q::zero() }).collect() };
        for k in 0..=n {
            a.push(unit(k, -Q::one()));
            b.push(Q::zero());
            if k != i {
                let mut row = unit(k, Q::one());
                row[i] -= Q::one();
                a.push(row);
                b.push(Q::zero());
            }
            if k != j {
                let mut row = unit(j, Q::one());
                row[k] -= Q::one();
                a.push(row);
                b.push(Q::zero());
            }
        }
        // |b′ + M(x − b_Δ) − y| ≤ ε, and M·b_Δ = 0
        let lin = m.piece_linear(j);
        debug_assert!(lin.iter().all(|row| row.iter().map(|v| v * bd).sum::<Q>().is_zero()));
        for (r, row) in lin.iter().enumerate() {
            let off = y[r] - m.b_prime()[r];
            a.push(row.clone());
            b.push(off + eps);
            a.push(row.iter().map(|v| -v).collect());
            b.push(eps - off);
        }
        polytope_nonempty(&eq, &eq_rhs, &a, &b)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim6Report {
    pub eps: Scale,
    #[serde(with = "serde_q")]
    pub l: Q,
    pub probes: usize,
    /// Probes outside `B(b′, Lε)`, which need the exact test.
    pub outside_ball: usize,
    /// Of those, how many the Lipschitz prefilter could not rule out.
    pub exact_checks: usize,
    #[serde(serialize_with = "ser_points")]
    pub violators: Vec<Point>,
}

impl Claim6Report {
    pub fn holds(&self) -> bool {
        self.violators.is_empty()
    }
}

/// Checks that points of `σ` within `ε` of every perturbed star lie in
/// `B(b′, Lε)`.
pub fn claim6_check(
    sigma: &Simplex,
    b_prime: &[Q],
    eps: Scale,
    l: LipschitzBound,
    probe: &Probe,
) -> Result<Claim6Report> {
    let e = eps.value();
    if !e.is_positive() {
        return input("ε must be positive");
    }
    if !in_half_simplex(sigma, b_prime) {
        return input("b′ lies outside ½b_σ + ½σ");
    }
    let n = sigma.dim();
    let m = BAffineMap::identity(sigma.clone(), b_prime.to_vec())?;
    let (_, inv_norm) = m.lip_parts();
    let radius = l.value() * e;
    let pts: Vec<Point> = probe.weights(n)?.iter().map(|w| sigma.combination(w)).collect();
    let results: Vec<(bool, bool, bool)> = pts
        .par_iter()
        .map(|y| {
            if sup_dist(y, b_prime) <= radius {
                return (false, false, false);
            }
            let x = m.try_invert(y).expect("probe lies in σ");
            // f⁻¹ moves points by at most Lip(f⁻¹)·ε
            if (0..=n).any(|i| !near_std_star(&x, i, inv_norm * e)) {
                return (true, false, false);
            }
            let bad = (0..=n).all(|i| near_perturbed_star(&m, i, y, e));
            (true, true, bad)
        })
        .collect();
    let violators = pts.iter().zip(&results).filter(|(_, r)| r.2).map(|(p, _)| p.clone()).collect();
    Ok(Claim6Report {
        eps,
        l: l.value(),
        probes: pts.len(),
        outside_ball: results.iter().filter(|r| r.0).count(),
        exact_checks: results.iter().filter(|r| r.1).count(),
        violators,
    })
}
