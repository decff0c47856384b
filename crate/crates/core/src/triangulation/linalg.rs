//! Exact rational linear algebra on small dense matrices.

use num_traits::{One, Signed, Zero};

use crate::scale::Q;

pub type Matrix = Vec<Vec<Q>>;

/// Solve `a · x = b` by Gaussian elimination; `None` if `a` is singular.
pub fn solve(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    eliminate(&mut m, n)?;
    Some(m.into_iter().map(|r| r[n]).collect())
}

/// Inverse of a square matrix; `None` if singular.
pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    eliminate(&mut m, n)?;
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Gauss-Jordan on the first `n` columns of an augmented matrix.
fn eliminate(m: &mut Matrix, n: usize) -> Option<()> {
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        let pivot_row = m[col].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    Some(())
}

pub fn det(a: &Matrix) -> Q {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Q::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            d = -d;
        }
        let p = m[col][col];
        d *= p;
        for r in col + 1..n {
            let f = m[r][col] / p;
            if !f.is_zero() {
                for c in col..n {
                    let v = m[col][c];
                    m[r][c] -= f * v;
                }
            }
        }
    }
    d
}

pub fn mat_vec(a: &Matrix, x: &[Q]) -> Vec<Q> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

/// Induced `∞ → ∞` operator norm: the largest absolute row sum.
pub fn row_sum_norm(a: &Matrix) -> Q {
    a.iter().map(|row| row.iter().map(|v| v.abs()).sum::<Q>()).max().unwrap_or_else(Q::zero)
}

pub fn sup_dist(x: &[Q], y: &[Q]) -> Q {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Q::zero)
}

/// Whether `{x : eq · x = eq_rhs, ineq · x ≤ ineq_rhs}` is nonempty, assuming
/// it is bounded. A nonempty bounded polyhedron has a vertex, so every choice
/// of tight inequalities completing the equalities to a square system is tried.
pub fn polytope_nonempty(eq: &Matrix, eq_rhs: &[Q], ineq: &Matrix, ineq_rhs: &[Q]) -> bool {
    let dim = eq.first().or(ineq.first()).map_or(0, Vec::len);
    if dim == 0 {
        return ineq_rhs.iter().all(|b| !b.is_negative()) && eq_rhs.iter().all(Zero::is_zero);
    }
    let need = dim.saturating_sub(eq.len());
    let mut pick: Vec<usize> = (0..need).collect();
    if need > ineq.len() {
        return false;
    }
    loop {
        let mut a: Matrix = eq.clone();
        let mut b: Vec<Q> = eq_rhs.to_vec();
        for &k in &pick {
            a.push(ineq[k].clone());
            b.push(ineq_rhs[k]);
        }
        if a.len() == dim {
            if let Some(x) = solve(&a, &b) {
                let ok = ineq
                    .iter()
                    .zip(ineq_rhs)
                    .all(|(row, &rhs)| row.iter().zip(&x).map(|(p, q)| p * q).sum::<Q>() <= rhs);
                if ok {
                    return true;
                }
            }
        }
        // next combination in lexicographic order
        let mut i = need;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            if pick[i] < ineq.len() - need + i {
                pick[i] += 1;
                for j in i + 1..need {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scale::{q, qi};

    fn m(rows: &[&[i128]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| qi(v)).collect()).collect()
    }

    #[test]
    fn solve_and_invert() {
        let a = m(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[qi(3), qi(5)]).unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_vec(&inv, &[qi(3), qi(5)]), x);
        assert_eq!(det(&a), qi(5));
        assert!(solve(&m(&[&[1, 2], &[2, 4]]), &[qi(1), qi(1)]).is_none());
        assert_eq!(det(&m(&[&[0, 1], &[1, 0]])), qi(-1));
    }

    #[test]
    fn feasibility() {
        // x + y = 1, x, y ≥ 0, x ≤ 1/3
        let eq = m(&[&[1, 1]]);
        let ineq = m(&[&[-1, 0], &[0, -1], &[1, 0]]);
        assert!(polytope_nonempty(&eq, &[qi(1)], &ineq, &[qi(0), qi(0), q(1, 3)]));
        // additionally y ≤ 1/2 is infeasible
        let mut ineq2 = ineq.clone();
        ineq2.push(vec![qi(0), qi(1)]);
        assert!(!polytope_nonempty(&eq, &[qi(1)], &ineq2, &[qi(0), qi(0), q(1, 3), q(1, 2)]));
    }
}
