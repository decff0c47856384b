use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::kuhn::kuhn_simplices;
use super::linalg::{inverse, mat_vec, row_sum_norm, Matrix};
use super::simplex::{Point, Simplex, StdSimplex};
use crate::error::{input, Result};
use crate::scale::{qi, serde_q, Q};

/// An upper bound `L ≥ 1` for `Lip(f) · Lip(f⁻¹)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LipschitzBound(#[serde(with = "serde_q")] Q);

impl LipschitzBound {
    pub fn new(l: Q) -> Result<Self> {
        if l < Q::one() {
            return input("a Lipschitz product bound is at least 1");
        }
        Ok(LipschitzBound(l))
    }

    pub fn value(&self) -> Q {
        self.0
    }
}

/// One affine piece, on the cone where coordinate `j` is smallest:
/// `f(x) = b′ + M (x − b_Δ)` and `f⁻¹(y) = b_Δ + A (y − b′)`.
#[derive(Clone, Debug)]
struct Piece {
    lin: Matrix,
    inv_lin: Matrix,
}

/// The `b_Δ`-affine map `Δ → σ` sending `v_k` to the vertex `corr[k]` of
/// `σ` and `b_Δ` to `b′`.
#[derive(Clone, Debug)]
pub struct BAffineMap {
    simplex: Simplex,
    b_prime: Point,
    corr: Vec<usize>,
    pieces: Vec<Piece>,
}

impl BAffineMap {
    pub fn new(simplex: Simplex, b_prime: Point, corr: Vec<usize>) -> Result<Self> {
        let n = simplex.dim();
        let mut seen = vec![false; n + 1];
        if corr.len() != n + 1 || corr.iter().any(|&c| c > n || std::mem::replace(&mut seen[c], true)) {
            return input("vertex correspondence must be a permutation of the simplex vertices");
        }
        if b_prime.len() != n || simplex.barycentric(&b_prime).iter().any(|w| !w.is_positive()) {
            return input("b′ must lie in the interior of the simplex");
        }
        let mut pieces = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut lin: Matrix = vec![vec![Q::zero(); n + 1]; n];
            for k in (0..=n).filter(|&k| k != j) {
                let w = simplex.vertex(corr[k]);
                for r in 0..n {
                    let d = w[r] - b_prime[r];
                    lin[r][k] = d;
                    lin[r][j] -= d;
                }
            }
            let mut square = lin.clone();
            square.push(vec![Q::one(); n + 1]);
            let Some(inv) = inverse(&square) else {
                return input(format!("degenerate affine piece {j}"));
            };
            let inv_lin = inv.into_iter().map(|row| row[..n].to_vec()).collect();
            pieces.push(Piece { lin, inv_lin });
        }
        Ok(BAffineMap { simplex, b_prime, corr, pieces })
    }

    /// The map matching `v_k` with the `k`-th vertex of `σ`.
    pub fn identity(simplex: Simplex, b_prime: Point) -> Result<Self> {
        let n = simplex.dim();
        BAffineMap::new(simplex, b_prime, (0..=n).collect())
    }

    pub fn simplex(&self) -> &Simplex {
        &self.simplex
    }

    pub fn b_prime(&self) -> &Point {
        &self.b_prime
    }

    pub fn correspondence(&self) -> &[usize] {
        &self.corr
    }

    fn dim(&self) -> usize {
        self.simplex.dim()
    }

    /// Linear part of the piece on the cone where coordinate `j` is smallest.
    pub fn piece_linear(&self, j: usize) -> &Matrix {
        &self.pieces[j].lin
    }

    pub fn eval(&self, x: &[Q]) -> Result<Point> {
        let n = self.dim();
        if !StdSimplex::new(n).contains(x) {
            return input("argument is not in the standard simplex");
        }
        let j = (0..=n).min_by_key(|&k| x[k]).unwrap_or(0);
        Ok(self.eval_piece(j, x))
    }

    fn eval_piece(&self, j: usize, x: &[Q]) -> Point {
        let bd = Q::new(1, self.dim() as i128 + 1);
        let rel: Vec<Q> = x.iter().map(|v| v - bd).collect();
        mat_vec(&self.pieces[j].lin, &rel).into_iter().zip(&self.b_prime).map(|(a, b)| a + b).collect()
    }

    /// `f⁻¹(y)`, or `None` if `y ∉ σ`.
    pub fn try_invert(&self, y: &[Q]) -> Option<Point> {
        let n = self.dim();
        if y.len() != n {
            return None;
        }
        let bd = Q::new(1, n as i128 + 1);
        let rel: Vec<Q> = y.iter().zip(&self.b_prime).map(|(a, b)| a - b).collect();
        for (j, piece) in self.pieces.iter().enumerate() {
            let x: Point = mat_vec(&piece.inv_lin, &rel).into_iter().map(|v| v + bd).collect();
            if x.iter().all(|v| !v.is_negative()) && x.iter().all(|v| *v >= x[j]) {
                return Some(x);
            }
        }
        None
    }

    pub fn invert(&self, y: &[Q]) -> Result<Point> {
        self.try_invert(y).ok_or_else(|| crate::Error::Input("point is not in the simplex".into()))
    }

    /// Whether `y` lies in the perturbed star of the vertex of `σ` with
    /// index `v`.
    pub fn star_contains(&self, v: usize, y: &[Q]) -> bool {
        let Some(i) = self.corr.iter().position(|&c| c == v) else {
            return false;
        };
        match self.try_invert(y) {
            Some(x) => x.iter().all(|c| *c <= x[i]),
            None => false,
        }
    }

    /// Row-sum operator norms of the forward and inverse pieces.
    pub fn lip_parts(&self) -> (Q, Q) {
        let fwd = self.pieces.iter().map(|p| row_sum_norm(&p.lin)).max().unwrap_or_else(Q::zero);
        let inv = self.pieces.iter().map(|p| row_sum_norm(&p.inv_lin)).max().unwrap_or_else(Q::zero);
        (fwd, inv)
    }
}

pub fn b_affine_eval(m: &BAffineMap, x: &[Q]) -> Result<Point> {
    m.eval(x)
}

pub fn b_affine_invert(m: &BAffineMap, y: &[Q]) -> Result<Point> {
    m.invert(y)
}

pub fn bary_star_membership(m: &BAffineMap, v: usize, y: &[Q]) -> bool {
    m.star_contains(v, y)
}

pub fn lip_product(m: &BAffineMap) -> Result<LipschitzBound> {
    let (f, g) = m.lip_parts();
    LipschitzBound::new(f * g)
}

/// The point `½ b_σ + ½ Σ λ_k v_k` of the half-simplex.
pub fn half_simplex_point(s: &Simplex, weights: &[Q]) -> Point {
    let b = s.barycenter();
    let y = s.combination(weights);
    b.iter().zip(&y).map(|(p, q)| (p + q) / qi(2)).collect()
}

pub fn in_half_simplex(s: &Simplex, p: &[Q]) -> bool {
    let floor = Q::new(1, 2 * (s.dim() as i128 + 1));
    p.len() == s.dim() && s.barycentric(p).iter().all(|w| *w >= floor)
}

/// Barycentric weight vectors with denominator `d`.
pub fn weight_grid(n: usize, d: u32) -> Vec<Vec<Q>> {
    fn go(left: u32, slots: usize, d: u32, cur: &mut Vec<Q>, out: &mut Vec<Vec<Q>>) {
        if slots == 1 {
            cur.push(Q::new(left as i128, d as i128));
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in (0..=left).rev() {
            cur.push(Q::new(k as i128, d as i128));
            go(left - k, slots - 1, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(d, n + 1, d, &mut Vec::new(), &mut out);
    out
}

/// Result of sweeping `b′` over a grid in the half-simplices of the base
/// Kuhn simplices.
#[derive(Clone, Debug, Serialize)]
pub struct LipSweep {
    pub n: usize,
    pub density: u32,
    #[serde(with = "serde_q")]
    pub c: Q,
    /// Base simplex and `b′` attaining the maximum.
    pub argmax_simplex: usize,
    #[serde(serialize_with = "serde_q::serialize_vec")]
    pub argmax_weights: Vec<Q>,
    #[serde(serialize_with = "serde_q::serialize_vec")]
    pub argmax_b_prime: Point,
}

impl LipSweep {
    /// `L = n·C`.
    pub fn l(&self) -> LipschitzBound {
        LipschitzBound::new(self.c * qi(self.n as i128)).expect("sweep constant is at least 1")
    }
}

/// Largest [`lip_product`] over `b′ = ½b_σ + ½Σλ_k v_k` with `λ` on the grid
/// of denominator `density`, for every base simplex of dimension `n`.
pub fn lip_sweep(n: usize, density: u32) -> Result<LipSweep> {
    if density == 0 {
        return input("sweep density must be positive");
    }
    let grid = weight_grid(n, density);
    let mut best: Option<LipSweep> = None;
    for (si, s) in kuhn_simplices(n)?.into_iter().enumerate() {
        for w in &grid {
            let bp = half_simplex_point(&s, w);
            let m = BAffineMap::identity(s.clone(), bp.clone())?;
            let c = lip_product(&m)?.value();
            if best.as_ref().is_none_or(|b| c > b.c) {
                best =
                    Some(LipSweep { n, density, c, argmax_simplex: si, argmax_weights: w.clone(), argmax_b_prime: bp });
            }
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Three perturbed barycenters of `σ` exercising the half-simplex: `b_σ`,
/// the corner `½b_σ + ½v_0`, and the point where the sweep attains `C`.
pub fn sample_b_primes(s: &Simplex, sweep: &LipSweep) -> [Point; 3] {
    let n = s.dim();
    let corner: Vec<Q> = (0..=n).map(|k| if k == 0 { Q::one() } else { Q::zero() }).collect();
    [s.barycenter(), half_simplex_point(s, &corner), half_simplex_point(s, &sweep.argmax_weights)]
}
