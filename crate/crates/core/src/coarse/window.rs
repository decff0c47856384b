use std::collections::VecDeque;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{PointId, PointSet, Space};
use crate::error::{input, Result};
use crate::scale::{fmt_q, qi, serde_q, Scale, Q};

/// Largest number of lattice points a window may hold.
pub const MAX_WINDOW_POINTS: usize = 1 << 24;

/// JSON description of a lattice window: `{dim, q, box: [[lo, hi], ...], margin}`.
///
/// Box bounds and margin are in coordinate units; points are the lattice
/// points `k / q` inside the box.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub dim: usize,
    #[serde(default = "one")]
    pub q: i64,
    #[serde(rename = "box")]
    pub bounds: Vec<[QValue; 2]>,
    #[serde(default)]
    pub margin: Scale,
}

fn one() -> i64 {
    1
}

/// Serde wrapper for a signed rational bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QValue(#[serde(with = "serde_q")] pub Q);

/// All lattice points of resolution `1/q` in an axis-aligned box, with the
/// sup-norm metric.
#[derive(Clone, Debug)]
pub struct Window {
    dim: usize,
    q: i64,
    box_lo: Vec<Q>,
    box_hi: Vec<Q>,
    lo: Vec<i64>,
    hi: Vec<i64>,
    stride: Vec<usize>,
    len: usize,
    margin: Scale,
}

impl Window {
    pub fn from_spec(spec: &WindowSpec) -> Result<Self> {
        if spec.dim == 0 {
            return input("window dimension must be positive");
        }
        if spec.q <= 0 {
            return input("window resolution q must be positive");
        }
        if spec.bounds.len() != spec.dim {
            return input(format!("window has dim {} but {} box intervals", spec.dim, spec.bounds.len()));
        }
        let qq = qi(spec.q as i128);
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        let mut extent = Vec::new();
        for [a, b] in &spec.bounds {
            if a.0 > b.0 {
                return input(format!("empty box interval [{}, {}]", fmt_q(&a.0), fmt_q(&b.0)));
            }
            let l = (a.0 * qq).ceil().to_integer();
            let h = (b.0 * qq).floor().to_integer();
            if l > h {
                return input("box interval contains no lattice point");
            }
            lo.push(l as i64);
            hi.push(h as i64);
            extent.push((h - l + 1) as usize);
        }
        let mut len: usize = 1;
        for &e in &extent {
            len = len.checked_mul(e).filter(|&n| n <= MAX_WINDOW_POINTS).ok_or_else(|| {
                crate::error::Error::Refused(format!("window exceeds {MAX_WINDOW_POINTS} lattice points"))
            })?;
        }
        let mut stride = vec![1; spec.dim];
        for i in (0..spec.dim.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * extent[i + 1];
        }
        Ok(Window {
            dim: spec.dim,
            q: spec.q,
            box_lo: spec.bounds.iter().map(|b| b[0].0).collect(),
            box_hi: spec.bounds.iter().map(|b| b[1].0).collect(),
            lo,
            hi,
            stride,
            len,
            margin: spec.margin,
        })
    }

    /// Integer lattice box `[lo, hi]` (resolution 1).
    pub fn lattice(lo: &[i64], hi: &[i64], margin: Scale) -> Result<Self> {
        Window::grid(1, lo, hi, margin)
    }

    /// Box `[lo, hi]` (integer coordinates) sampled at resolution `1/q`.
    pub fn grid(q: i64, lo: &[i64], hi: &[i64], margin: Scale) -> Result<Self> {
        if lo.len() != hi.len() {
            return input("box bounds of different dimensions");
        }
        Window::from_spec(&WindowSpec {
            dim: lo.len(),
            q,
            bounds: lo.iter().zip(hi).map(|(&a, &b)| [QValue(qi(a as i128)), QValue(qi(b as i128))]).collect(),
            margin,
        })
    }

    pub fn spec(&self) -> WindowSpec {
        WindowSpec {
            dim: self.dim,
            q: self.q,
            bounds: self.box_lo.iter().zip(&self.box_hi).map(|(&a, &b)| [QValue(a), QValue(b)]).collect(),
            margin: self.margin,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> i64 {
        self.q
    }

    /// Lattice numerators of the lower and upper corners.
    pub fn numer_bounds(&self) -> (&[i64], &[i64]) {
        (&self.lo, &self.hi)
    }

    pub fn box_bounds(&self) -> (&[Q], &[Q]) {
        (&self.box_lo, &self.box_hi)
    }

    /// Coordinate numerators of a point (coordinate = numerator / q).
    pub fn coords(&self, p: PointId) -> Vec<i64> {
        let mut rest = p;
        (0..self.dim)
            .map(|i| {
                let (k, r) = rest.div_rem(&self.stride[i]);
                rest = r;
                self.lo[i] + k as i64
            })
            .collect()
    }

    pub fn point(&self, p: PointId) -> Vec<Q> {
        let qq = self.q as i128;
        self.coords(p).into_iter().map(|c| Q::new(c as i128, qq)).collect()
    }

    /// Point with the given coordinate numerators, if it lies in the window.
    pub fn id_of(&self, numer: &[i64]) -> Option<PointId> {
        if numer.len() != self.dim {
            return None;
        }
        let mut id = 0;
        for i in 0..self.dim {
            if numer[i] < self.lo[i] || numer[i] > self.hi[i] {
                return None;
            }
            id += (numer[i] - self.lo[i]) as usize * self.stride[i];
        }
        Some(id)
    }

    /// Point at rational coordinates, if it is a lattice point of the window.
    pub fn id_of_point(&self, x: &[Q]) -> Option<PointId> {
        let qq = qi(self.q as i128);
        let numer: Option<Vec<i64>> = x
            .iter()
            .map(|c| {
                let v = c * qq;
                v.is_integer().then(|| v.to_integer() as i64)
            })
            .collect();
        self.id_of(&numer?)
    }

    /// Points whose coordinates satisfy `pred` (called with numerators).
    pub fn select(&self, pred: impl Fn(&[i64]) -> bool) -> PointSet {
        PointSet::from_sorted((0..self.len).filter(|&p| pred(&self.coords(p))).collect())
    }

    fn steps(&self, r: Scale) -> i64 {
        (r.value() * qi(self.q as i128)).floor().to_integer() as i64
    }

    fn scale_of_steps(&self, k: i64) -> Scale {
        Scale::new(Q::new(k as i128, self.q as i128)).expect("nonnegative")
    }

    /// Window points inside the sup-ball of radius `r` about an arbitrary
    /// rational centre.
    pub fn ball_around(&self, center: &[Q], r: Scale) -> Vec<PointId> {
        let qq = qi(self.q as i128);
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let l = ((center[i] - r.value()) * qq).ceil().to_integer() as i64;
            let h = ((center[i] + r.value()) * qq).floor().to_integer() as i64;
            lo.push(l.max(self.lo[i]));
            hi.push(h.min(self.hi[i]));
            if lo[i] > hi[i] {
                return Vec::new();
            }
        }
        self.scan_box(&lo, &hi)
    }

    fn scan_box(&self, lo: &[i64], hi: &[i64]) -> Vec<PointId> {
        let mut out = Vec::new();
        let mut cur = lo.to_vec();
        loop {
            out.push(self.id_of(&cur).expect("inside window"));
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return out;
                }
                axis -= 1;
                if cur[axis] < hi[axis] {
                    cur[axis] += 1;
                    break;
                }
                cur[axis] = lo[axis];
            }
        }
    }
}

impl Space for Window {
    fn len(&self) -> usize {
        self.len
    }

    fn dist(&self, a: PointId, b: PointId) -> Scale {
        let (ca, cb) = (self.coords(a), self.coords(b));
        let k = ca.iter().zip(&cb).map(|(x, y)| (x - y).abs()).max().unwrap_or(0);
        self.scale_of_steps(k)
    }

    fn margin(&self) -> Scale {
        self.margin
    }

    fn in_core(&self, p: PointId) -> bool {
        let m = self.margin.value();
        self.point(p).iter().enumerate().all(|(i, x)| x - self.box_lo[i] >= m && self.box_hi[i] - x >= m)
    }

    fn ball(&self, center: PointId, r: Scale) -> Vec<PointId> {
        let c = self.coords(center);
        let k = self.steps(r);
        let lo: Vec<i64> = (0..self.dim).map(|i| (c[i] - k).max(self.lo[i])).collect();
        let hi: Vec<i64> = (0..self.dim).map(|i| (c[i] + k).min(self.hi[i])).collect();
        self.scan_box(&lo, &hi)
    }

    /// Multi-source breadth-first search over king moves; in a box this is
    /// exactly the sup-distance in lattice steps.
    fn distance_field(&self, sources: &[bool]) -> Vec<Option<Scale>> {
        let mut steps: Vec<i64> = vec![-1; self.len];
        let mut queue = VecDeque::new();
        for (p, &s) in sources.iter().enumerate() {
            if s {
                steps[p] = 0;
                queue.push_back(p);
            }
        }
        let offsets = king_offsets(self.dim);
        while let Some(p) = queue.pop_front() {
            let c = self.coords(p);
            for off in &offsets {
                let nb: Vec<i64> = c.iter().zip(off).map(|(x, d)| x + d).collect();
                if let Some(n) = self.id_of(&nb) {
                    if steps[n] < 0 {
                        steps[n] = steps[p] + 1;
                        queue.push_back(n);
                    }
                }
            }
        }
        steps.into_iter().map(|k| (k >= 0).then(|| self.scale_of_steps(k))).collect()
    }

    /// The sup-norm diameter is the widest coordinate range.
    fn set_diameter(&self, set: &[PointId]) -> Scale {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for &p in set {
            for (i, c) in self.coords(p).into_iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        let k = (0..self.dim).map(|i| hi[i] - lo[i]).max().unwrap_or(0).max(0);
        self.scale_of_steps(k)
    }

    fn lattice(&self) -> Option<&Window> {
        Some(self)
    }

    fn encode(&self, p: PointId) -> Value {
        Value::from(self.coords(p))
    }

    fn decode(&self, v: &Value) -> Result<PointId> {
        let numer: Option<Vec<i64>> = v.as_array().map(|a| a.iter().map(Value::as_i64).collect()).unwrap_or(None);
        match numer {
            Some(n) => match self.id_of(&n) {
                Some(id) => Ok(id),
                None => input(format!("point {v} lies outside the window")),
            },
            None => input(format!("expected an array of integer numerators, got {v}")),
        }
    }
}

fn king_offsets(dim: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..dim {
        out = out
            .into_iter()
            .flat_map(|v| {
                [-1, 0, 1].into_iter().map(move |d| {
                    let mut w = v.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&d| d != 0));
    out
}
