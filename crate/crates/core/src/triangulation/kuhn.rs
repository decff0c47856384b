use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use super::simplex::{Point, Simplex};
use crate::error::{input, refused, Result};
use crate::scale::{qi, Q};

/// Largest dimension handled by default.
pub const MAX_KUHN_DIM: usize = 4;

/// Permutations of `0..n` in lexicographic order.
pub(super) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Vertices of the chain `0 < e_{π₀} < e_{π₀}+e_{π₁} < …` in the unit cube.
fn chain_vertices(perm: &[usize]) -> Vec<Vec<i64>> {
    let mut v = vec![0i64; perm.len()];
    let mut out = vec![v.clone()];
    for &c in perm {
        v[c] = 1;
        out.push(v.clone());
    }
    out
}

/// The `n!` simplices of the unit cube from maximal chains in `{0,1}ⁿ`.
pub fn kuhn_simplices(n: usize) -> Result<Vec<Simplex>> {
    kuhn_simplices_up_to(n, MAX_KUHN_DIM)
}

pub fn kuhn_simplices_up_to(n: usize, max_dim: usize) -> Result<Vec<Simplex>> {
    if n == 0 || n > max_dim {
        return refused(format!("Kuhn triangulation supports 1 ≤ n ≤ {max_dim}, got {n}"));
    }
    permutations(n)
        .iter()
        .map(|p| {
            Simplex::new(
                chain_vertices(p).into_iter().map(|v| v.into_iter().map(|c| qi(c as i128)).collect()).collect(),
            )
        })
        .collect()
}

/// A simplex of the scaled complex: the cell `side · (cell + [0,1]ⁿ)` and
/// the chain order inside it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KuhnCell {
    pub cell: Vec<i64>,
    pub perm: Vec<usize>,
}

impl KuhnCell {
    /// Integer vertex coordinates, in units of the side length.
    pub fn vertex_indices(&self) -> Vec<Vec<i64>> {
        chain_vertices(&self.perm).into_iter().map(|v| v.iter().zip(&self.cell).map(|(a, b)| a + b).collect()).collect()
    }
}

/// The Kuhn triangulation of `ℝⁿ` scaled by `1/ε`.
#[derive(Clone, Debug)]
pub struct KuhnComplex {
    n: usize,
    base: Vec<Simplex>,
    scale_inv: Q,
}

impl KuhnComplex {
    /// Complex whose simplices have side `1/scale_inv`.
    pub fn new(n: usize, scale_inv: Q) -> Result<Self> {
        if !scale_inv.is_positive() {
            return input("scale must be positive");
        }
        Ok(KuhnComplex { n, base: kuhn_simplices(n)?, scale_inv })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base_simplices(&self) -> &[Simplex] {
        &self.base
    }

    pub fn scale_inv(&self) -> Q {
        self.scale_inv
    }

    pub fn side(&self) -> Q {
        self.scale_inv.recip()
    }

    pub fn simplex(&self, k: &KuhnCell) -> Simplex {
        let side = self.side();
        let vs: Vec<Point> =
            k.vertex_indices().into_iter().map(|v| v.into_iter().map(|c| qi(c as i128) * side).collect()).collect();
        Simplex::new(vs).expect("Kuhn simplices are nondegenerate")
    }

    fn unit_coords(&self, x: &[Q]) -> Vec<Q> {
        x.iter().map(|c| c * self.scale_inv).collect()
    }

    /// Deterministic simplex containing `x`.
    pub fn locate(&self, x: &[Q]) -> Result<KuhnCell> {
        if x.len() != self.n {
            return input(format!("point has {} coordinates, complex has dim {}", x.len(), self.n));
        }
        let u = self.unit_coords(x);
        let cell: Vec<i64> = u.iter().map(|c| c.floor().to_integer() as i64).collect();
        let frac: Vec<Q> = u.iter().zip(&cell).map(|(c, &z)| c - qi(z as i128)).collect();
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.sort_by(|&a, &b| frac[b].cmp(&frac[a]).then(a.cmp(&b)));
        Ok(KuhnCell { cell, perm })
    }

    /// Every simplex of the complex whose closure contains `x`, sorted.
    pub fn containing(&self, x: &[Q]) -> Vec<KuhnCell> {
        let u = self.unit_coords(x);
        let mut choices: Vec<Vec<i64>> = Vec::with_capacity(self.n);
        for c in &u {
            let f = c.floor().to_integer() as i64;
            if c.is_integer() {
                choices.push(vec![f - 1, f]);
            } else {
                choices.push(vec![f]);
            }
        }
        let mut out = Vec::new();
        let mut idx = vec![0usize; self.n];
        loop {
            let cell: Vec<i64> = idx.iter().zip(&choices).map(|(&i, ch)| ch[i]).collect();
            let frac: Vec<Q> = u.iter().zip(&cell).map(|(c, &z)| c - qi(z as i128)).collect();
            for perm in chains_through(&frac) {
                out.push(KuhnCell { cell: cell.clone(), perm });
            }
            let mut k = 0;
            loop {
                if k == self.n {
                    out.sort();
                    return out;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// Barycentric coordinates of `x` in `k`, in chain order.
    pub fn barycentric(&self, k: &KuhnCell, x: &[Q]) -> Vec<Q> {
        let u: Vec<Q> = self.unit_coords(x).iter().zip(&k.cell).map(|(c, &z)| c - qi(z as i128)).collect();
        let p = &k.perm;
        let mut out = Vec::with_capacity(self.n + 1);
        out.push(Q::one() - u[p[0]]);
        for m in 0..self.n {
            let next = if m + 1 < self.n { u[p[m + 1]] } else { Q::zero() };
            out.push(u[p[m]] - next);
        }
        out
    }
}

/// Chain orders `π` with `1 ≥ f[π₀] ≥ … ≥ f[π_{n−1}] ≥ 0`.
fn chains_through(frac: &[Q]) -> Vec<Vec<usize>> {
    if frac.iter().any(|f| f.is_negative() || *f > Q::one()) {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..frac.len()).collect();
    order.sort_by(|&a, &b| frac[b].cmp(&frac[a]).then(a.cmp(&b)));
    // permute freely within runs of equal values
    let mut out = vec![Vec::new()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && frac[order[j]].cmp(&frac[order[i]]) == Ordering::Equal {
            j += 1;
        }
        let run = &order[i..j];
        let mut next = Vec::new();
        for prefix in &out {
            for p in permutations(run.len()) {
                let mut v: Vec<usize> = prefix.clone();
                v.extend(p.iter().map(|&k| run[k]));
                next.push(v);
            }
        }
        out = next;
        i = j;
    }
    out
}

/// The simplex of the complex that [`KuhnComplex::locate`] assigns to `x`.
pub fn locate_simplex(k: &KuhnComplex, x: &[Q]) -> Result<Simplex> {
    Ok(k.simplex(&k.locate(x)?))
}
