use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::linalg::{det, inverse, mat_vec, Matrix};
use crate::error::{input, Result};
use crate::scale::{fmt_q, qi, Q};

pub type Point = Vec<Q>;

/// The standard simplex `Δ ⊂ ℝ^{n+1}` spanned by the unit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StdSimplex {
    n: usize,
}

impl StdSimplex {
    pub fn new(n: usize) -> Self {
        StdSimplex { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertex(&self, i: usize) -> Point {
        (0..=self.n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
    }

    pub fn barycenter(&self) -> Point {
        vec![Q::new(1, self.n as i128 + 1); self.n + 1]
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        x.len() == self.n + 1 && x.iter().all(|v| !v.is_negative()) && x.iter().sum::<Q>() == Q::one()
    }
}

/// Whether `x ∈ Δ` lies in the barycentric star of the `i`-th vertex, i.e.
/// whether `x(i)` is a largest coordinate.
pub fn std_star_membership(n: usize, i: usize, x: &[Q]) -> Result<bool> {
    if !StdSimplex::new(n).contains(x) {
        return input("point is not in the standard simplex");
    }
    if i > n {
        return input(format!("vertex index {i} out of range for dimension {n}"));
    }
    Ok(x.iter().all(|v| *v <= x[i]))
}

/// A nondegenerate simplex in `ℝⁿ` with rational vertices.
#[derive(Clone, Debug)]
pub struct Simplex {
    vertices: Vec<Point>,
    /// Inverse of the edge matrix `[v_1 − v_0, …, v_n − v_0]`.
    edge_inv: Matrix,
}

impl PartialEq for Simplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices
    }
}

impl Eq for Simplex {}

impl Simplex {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len().saturating_sub(1);
        if vertices.is_empty() || vertices.iter().any(|v| v.len() != n) {
            return input("a simplex in ℝⁿ needs n+1 vertices with n coordinates each");
        }
        let edges = edge_matrix(&vertices);
        let Some(edge_inv) = inverse(&edges) else {
            return input("simplex vertices are affinely dependent");
        };
        Ok(Simplex { vertices, edge_inv })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Point {
        &self.vertices[i]
    }

    pub fn barycenter(&self) -> Point {
        let k = qi(self.vertices.len() as i128);
        (0..self.dim()).map(|c| self.vertices.iter().map(|v| v[c]).sum::<Q>() / k).collect()
    }

    /// The point with the given barycentric weights.
    pub fn combination(&self, weights: &[Q]) -> Point {
        (0..self.dim()).map(|c| self.vertices.iter().zip(weights).map(|(v, w)| v[c] * w).sum()).collect()
    }

    /// Barycentric coordinates of `p`, summing to one.
    pub fn barycentric(&self, p: &[Q]) -> Vec<Q> {
        let rel: Vec<Q> = p.iter().zip(&self.vertices[0]).map(|(a, b)| a - b).collect();
        let tail = mat_vec(&self.edge_inv, &rel);
        let head = Q::one() - tail.iter().sum::<Q>();
        std::iter::once(head).chain(tail).collect()
    }

    /// Gradients of the barycentric coordinate functions.
    pub fn barycentric_gradients(&self) -> Vec<Vec<Q>> {
        let n = self.dim();
        let head: Vec<Q> = (0..n).map(|c| -self.edge_inv.iter().map(|r| r[c]).sum::<Q>()).collect();
        std::iter::once(head).chain(self.edge_inv.iter().cloned()).collect()
    }

    pub fn contains(&self, p: &[Q]) -> bool {
        p.len() == self.dim() && self.barycentric(p).iter().all(|w| !w.is_negative())
    }

    pub fn volume(&self) -> Q {
        let n = self.dim() as i128;
        let fact: i128 = (1..=n).product();
        det(&edge_matrix(&self.vertices)).abs() / qi(fact)
    }

    /// `factor · σ + shift`.
    pub fn scaled_shifted(&self, factor: Q, shift: &[Q]) -> Result<Simplex> {
        Simplex::new(self.vertices.iter().map(|v| v.iter().zip(shift).map(|(x, s)| x * factor + s).collect()).collect())
    }

    pub fn to_json(&self) -> Value {
        json!(self.vertices.iter().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>())
    }
}

fn edge_matrix(vertices: &[Point]) -> Matrix {
    let n = vertices.len() - 1;
    (0..n).map(|r| (1..=n).map(|k| vertices[k][r] - vertices[0][r]).collect()).collect()
}
