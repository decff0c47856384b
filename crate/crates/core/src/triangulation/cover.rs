//! The cover of a lattice window by perturbed barycentric stars of a scaled
//! Kuhn triangulation.

use std::collections::BTreeMap;

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::baffine::{lip_sweep, BAffineMap, LipSweep};
use super::kuhn::{permutations, KuhnCell, KuhnComplex};
use super::linalg::sup_dist;
use super::simplex::Point;
use crate::coarse::{cover_multiplicity_at, mesh, Cover, Part, PointId, PointSet, Space, Window};
use crate::error::{input, refused, Error, Result};
use crate::scale::{fmt_q, qi, serde_q, Scale, Q};
use crate::smallness::PhiTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverConfig {
    /// Denominator of the `b′` grid used to estimate the Lipschitz constant.
    pub sweep_density: u32,
    /// Largest `k` tried in the side schedule `q · 2^k`.
    pub max_doublings: u32,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig { sweep_density: 16, max_doublings: 40 }
    }
}

/// `L·δ`, the radius at which the construction needs a `φ` value.
pub fn phi_demand(n: usize, delta: Scale, cfg: &CoverConfig) -> Result<Scale> {
    let sweep = lip_sweep(n, cfg.sweep_density)?;
    Scale::new(sweep.l().value() * delta.value())
}

/// A simplex of the scaled triangulation together with its chosen `b′`.
#[derive(Clone, Debug)]
pub struct PlacedSimplex {
    pub cell: KuhnCell,
    pub vertices: Vec<Point>,
    pub barycenter: Point,
    pub b_prime: Point,
    /// Whether `a` comes within `δ` of the simplex's cell.
    pub relevant: bool,
    /// Whether `b′` fell back to the barycenter after a failed search.
    pub fallback: bool,
}

impl PlacedSimplex {
    pub fn to_json(&self) -> Value {
        let pt = |p: &Point| p.iter().map(fmt_q).collect::<Vec<_>>();
        json!({
            "vertices": self.vertices.iter().map(pt).collect::<Vec<_>>(),
            "barycenter": pt(&self.barycenter),
            "b_prime": pt(&self.b_prime),
            "relevant": self.relevant,
            "fallback": self.fallback,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub n: usize,
    pub delta: Scale,
    #[serde(with = "serde_q")]
    pub eps: Q,
    #[serde(with = "serde_q")]
    pub side: Q,
    pub sweep: LipSweep,
    #[serde(with = "serde_q")]
    pub l: Q,
    pub phi_at_l_delta: Scale,
    /// `φ(Lδ)` widened by the distance from a barycenter to the lattice.
    #[serde(with = "serde_q")]
    pub phi_eff: Q,
    /// Largest `ℓ¹` norm of a barycentric gradient of a base simplex.
    #[serde(with = "serde_q")]
    pub gradient_bound: Q,
    pub simplices: usize,
    pub relevant_simplices: usize,
    pub fallback_simplices: usize,
    pub parts: usize,
    pub mesh: Scale,
    #[serde(with = "serde_q")]
    pub mesh_bound: Q,
    /// Most parts met by `B(a′, δ)` over core points `a′ ∈ a`.
    pub a_multiplicity: usize,
    pub a_witness: Option<Value>,
    /// Most parts met by a `δ`-ball about any core point.
    pub core_multiplicity: usize,
    /// Every part lies inside the open star of its vertex.
    pub stars_contained: bool,
}

impl CoverReport {
    pub fn holds(&self) -> bool {
        self.mesh.value() <= self.mesh_bound
            && self.a_multiplicity <= self.n
            && self.core_multiplicity <= self.n + 1
            && self.stars_contained
    }
}

#[derive(Clone, Debug)]
pub struct CoverResult {
    pub cover: Cover,
    pub simplices: Vec<PlacedSimplex>,
    pub report: CoverReport,
}

/// Builds the cover `{St′(v)}` of the window for the set `a` at scale `δ`.
///
/// `φ` must have an entry at `Lδ` (see [`phi_demand`]). Perturbed
/// barycenters are lattice points of the window's resolution, searched in
/// `ℤⁿ/q` (not only inside the window) against the finite set `a`.
pub fn build_cover(w: &Window, a: &PointSet, delta: Scale, phi: &PhiTable, cfg: &CoverConfig) -> Result<CoverResult> {
    let n = w.dim();
    if !delta.value().is_positive() {
        return input("δ must be positive");
    }
    if a.iter().any(|p| p >= w.len()) {
        return input("a contains points outside the window");
    }
    let sweep = lip_sweep(n, cfg.sweep_density)?;
    let l = sweep.l().value();
    let l_delta = Scale::new(l * delta.value())?;
    let Some(phi_ld) = phi.get(l_delta) else {
        return refused(format!("φ table has no entry at Lδ = {l_delta}"));
    };
    let q = w.resolution() as i128;
    let phi_eff = phi_ld.value() + Q::new(1, 2 * q);

    let unit = KuhnComplex::new(n, Q::one())?;
    let g1 = unit
        .base_simplices()
        .iter()
        .flat_map(|s| s.barycentric_gradients())
        .map(|g| g.iter().map(|v| v.abs()).sum::<Q>())
        .max()
        .unwrap_or_else(Q::one);
    let k1 = qi(2 * (n as i128 + 1)) * g1;
    let need1 = k1 * phi_eff;
    let need2 = k1 * qi(2) * delta.value();
    let mut side = None;
    for k in 0..=cfg.max_doublings {
        let s = qi(q) * qi(1i128 << k);
        if s >= need1 && s > need2 {
            side = Some(s);
            break;
        }
    }
    let Some(side) = side else {
        let top = qi(q) * qi(1i128 << cfg.max_doublings);
        let which = if top < need1 {
            "(1): ball about b_σ inside the half-simplex"
        } else {
            "(2): star neighbourhoods inside vertex stars"
        };
        return refused(format!("no side length q·2^k with k ≤ {} satisfies condition {which}", cfg.max_doublings));
    };
    let complex = KuhnComplex::new(n, side.recip())?;

    let pts: Vec<Point> = (0..w.len()).map(|p| w.point(p)).collect();
    let a_pts: Vec<&Point> = a.iter().map(|p| &pts[p]).collect();

    // simplices of every cell meeting the window box
    let (blo, bhi) = w.box_bounds();
    let cell_lo: Vec<i64> = blo.iter().map(|c| (c / side).floor().to_integer() as i64 - 1).collect();
    let cell_hi: Vec<i64> = bhi.iter().map(|c| (c / side).floor().to_integer() as i64).collect();
    let perms = permutations(n);
    let cells: Vec<KuhnCell> = lattice_box(&cell_lo, &cell_hi)
        .into_iter()
        .flat_map(|cell| perms.iter().map(move |perm| KuhnCell { cell: cell.clone(), perm: perm.clone() }))
        .collect();

    let search_radius = phi_eff - l_delta.value();
    let placed: Vec<Result<PlacedSimplex>> = cells
        .par_iter()
        .map(|kc| {
            let s = complex.simplex(kc);
            let lo: Vec<Q> = kc.cell.iter().map(|&c| qi(c as i128) * side - delta.value()).collect();
            let hi: Vec<Q> = kc.cell.iter().map(|&c| qi(c as i128 + 1) * side + delta.value()).collect();
            let relevant = a_pts.iter().any(|p| p.iter().zip(lo.iter().zip(&hi)).all(|(x, (l, h))| x >= l && x <= h));
            let bary = s.barycenter();
            let found = search_b_prime(&bary, search_radius, l_delta.value(), q, &a_pts);
            let (b_prime, fallback) = match found {
                Some(b) => (b, false),
                None if !relevant => (bary.clone(), true),
                None => {
                    return refused(format!(
                        "no perturbed barycenter for the simplex {} within φ(Lδ) = {phi_ld}",
                        s.to_json()
                    ))
                }
            };
            Ok(PlacedSimplex {
                cell: kc.clone(),
                vertices: s.vertices().to_vec(),
                barycenter: bary,
                b_prime,
                relevant,
                fallback,
            })
        })
        .collect();
    let placed: Vec<PlacedSimplex> = placed.into_iter().collect::<Result<_>>()?;
    let index: BTreeMap<&KuhnCell, usize> = placed.iter().enumerate().map(|(i, p)| (&p.cell, i)).collect();
    let maps: Vec<BAffineMap> = placed
        .iter()
        .map(|p| BAffineMap::identity(complex.simplex(&p.cell), p.b_prime.clone()))
        .collect::<Result<_>>()?;

    // window point → vertices (lattice indices) of the stars containing it
    let stars: Vec<Vec<Vec<i64>>> = pts
        .par_iter()
        .map(|x| {
            let mut vs: Vec<Vec<i64>> = Vec::new();
            for kc in complex.containing(x) {
                let Some(&si) = index.get(&kc) else { continue };
                let verts = kc.vertex_indices();
                for (vi, v) in verts.into_iter().enumerate() {
                    if maps[si].star_contains(vi, x) {
                        vs.push(v);
                    }
                }
            }
            vs.sort();
            vs.dedup();
            vs
        })
        .collect();
    let mut parts: BTreeMap<Vec<i64>, Vec<PointId>> = BTreeMap::new();
    for (p, vs) in stars.iter().enumerate() {
        if vs.is_empty() {
            return Err(Error::Input(format!("window point {} is in no star", w.encode(p))));
        }
        for v in vs {
            parts.entry(v.clone()).or_default().push(p);
        }
    }

    let stars_contained = parts.par_iter().all(|(v, members)| {
        members.iter().all(|&p| {
            complex.containing(&pts[p]).iter().any(|kc| {
                kc.vertex_indices()
                    .iter()
                    .position(|u| u == v)
                    .is_some_and(|vi| complex.barycentric(kc, &pts[p])[vi].is_positive())
            })
        })
    });

    let cover = Cover::new(
        parts
            .into_iter()
            .map(|(v, members)| Part {
                label: format!(
                    "v({})",
                    v.iter().map(|c| fmt_q(&(qi(*c as i128) * side))).collect::<Vec<_>>().join(",")
                ),
                points: PointSet::new(members),
                family: None,
            })
            .collect(),
    )?;
    let mesh_v = mesh(w, &cover)?;
    let (core_multiplicity, _) = cover_multiplicity_at(w, &cover, delta)?;
    let (a_multiplicity, a_witness) = multiplicity_on(w, &cover, a, delta);

    let report = CoverReport {
        n,
        delta,
        eps: side.recip(),
        side,
        sweep,
        l,
        phi_at_l_delta: phi_ld,
        phi_eff,
        gradient_bound: g1,
        simplices: placed.len(),
        relevant_simplices: placed.iter().filter(|p| p.relevant).count(),
        fallback_simplices: placed.iter().filter(|p| p.fallback).count(),
        parts: cover.len(),
        mesh: mesh_v,
        mesh_bound: qi(2) * side,
        a_multiplicity,
        a_witness: a_witness.map(|p| w.encode(p)),
        core_multiplicity,
        stars_contained,
    };
    Ok(CoverResult { cover, simplices: placed, report })
}

/// Every integer vector in the box `[lo, hi]`, in lexicographic order.
fn lattice_box<T: Copy + PartialOrd + std::ops::Add<Output = T> + One>(lo: &[T], hi: &[T]) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return out;
    }
    let mut cur = lo.to_vec();
    loop {
        out.push(cur.clone());
        let mut ax = cur.len();
        loop {
            if ax == 0 {
                return out;
            }
            ax -= 1;
            if cur[ax] < hi[ax] {
                cur[ax] = cur[ax] + T::one();
                break;
            }
            cur[ax] = lo[ax];
        }
    }
}

/// The first lattice point `y ∈ ℤⁿ/q` with `‖y − b‖ ≤ radius` (by distance,
/// then coordinates) whose distance to every point of `a` exceeds `clear`.
fn search_b_prime(b: &[Q], radius: Q, clear: Q, q: i128, a: &[&Point]) -> Option<Point> {
    if radius.is_negative() {
        return None;
    }
    let qq = qi(q);
    let lo: Vec<i128> = b.iter().map(|c| ((c - radius) * qq).ceil().to_integer()).collect();
    let hi: Vec<i128> = b.iter().map(|c| ((c + radius) * qq).floor().to_integer()).collect();
    let mut cands: Vec<(Q, Vec<i128>)> = lattice_box(&lo, &hi)
        .into_iter()
        .map(|c| {
            let y: Point = c.iter().map(|&v| Q::new(v, q)).collect();
            (sup_dist(&y, b), c)
        })
        .collect();
    cands.sort();
    cands.into_iter().find_map(|(_, c)| {
        let y: Point = c.iter().map(|&v| Q::new(v, q)).collect();
        a.iter().all(|p| sup_dist(p, &y) > clear).then_some(y)
    })
}

fn multiplicity_on(w: &Window, c: &Cover, a: &PointSet, r: Scale) -> (usize, Option<PointId>) {
    let index = c.membership(w.len());
    let mut best: (usize, Option<PointId>) = (0, None);
    for x in a.iter().filter(|&x| w.in_core(x)) {
        let mut met: Vec<u32> = w.ball(x, r).into_iter().flat_map(|y| index[y].iter().copied()).collect();
        met.sort_unstable();
        met.dedup();
        if best.1.is_none() || met.len() > best.0 {
            best = (met.len(), Some(x));
        }
    }
    best
}
