//! Finite-window model of metric coarse spaces.
//!
//! A [`Space`] is a finite slice of a coarse space: its points are addressed by
//! dense [`PointId`]s, distances are exact, and a boundary-safe *core* marks the
//! points whose balls (up to the margin) are not truncated by the slice. Every
//! universally quantified check in the toolkit ranges over the core.

mod cover;
mod maps;
mod window;

pub use cover::{cover_multiplicity_at, mesh, Cover, Part};
pub use maps::{
    check_coarse_equivalence, check_coarse_map, CoarseMapCheck, DisplacementViolation, EquivalenceReport, MapReport,
    ModulusViolation,
};
pub use window::{Window, WindowSpec};

use petgraph::unionfind::UnionFind;
use serde_json::Value;

use crate::error::{input, Result};
use crate::scale::Scale;

pub type PointId = usize;

/// A finite metric slice with a designated core.
pub trait Space: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Exact distance between two points of the slice.
    fn dist(&self, a: PointId, b: PointId) -> Scale;

    fn margin(&self) -> Scale;

    fn in_core(&self, p: PointId) -> bool;

    fn core(&self) -> PointSet {
        PointSet::from_sorted((0..self.len()).filter(|&p| self.in_core(p)).collect())
    }

    /// All points at distance at most `r` from `center`, ascending.
    fn ball(&self, center: PointId, r: Scale) -> Vec<PointId> {
        (0..self.len()).filter(|&p| self.dist(center, p) <= r).collect()
    }

    /// Distance from every point to the nearest point flagged in `sources`
    /// (`None` when there are no sources).
    fn distance_field(&self, sources: &[bool]) -> Vec<Option<Scale>> {
        let src: Vec<PointId> = (0..self.len()).filter(|&p| sources[p]).collect();
        (0..self.len()).map(|p| src.iter().map(|&s| self.dist(p, s)).min()).collect()
    }

    /// Largest pairwise distance of a nonempty set.
    fn set_diameter(&self, set: &[PointId]) -> Scale {
        let mut best = Scale::ZERO;
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                best = best.max(self.dist(a, b));
            }
        }
        best
    }

    /// JSON encoding of a point for reports and files.
    fn encode(&self, p: PointId) -> Value;

    /// Inverse of [`Space::encode`].
    fn decode(&self, v: &Value) -> Result<PointId>;

    /// The underlying lattice box, when the slice is one.
    fn lattice(&self) -> Option<&Window> {
        None
    }
}

/// A set of points of one space, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PointSet(Vec<PointId>);

impl PointSet {
    pub fn new(mut ids: Vec<PointId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        PointSet(ids)
    }

    pub(crate) fn from_sorted(ids: Vec<PointId>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        PointSet(ids)
    }

    pub fn empty() -> Self {
        PointSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.0.binary_search(&p).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[PointId] {
        &self.0
    }

    pub fn mask(&self, len: usize) -> Vec<bool> {
        let mut m = vec![false; len];
        for &p in &self.0 {
            m[p] = true;
        }
        m
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet::new(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet::from_sorted(self.iter().filter(|&p| !other.contains(p)).collect())
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet::from_sorted(self.iter().filter(|&p| other.contains(p)).collect())
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    pub fn encode(&self, space: &dyn Space) -> Value {
        Value::Array(self.iter().map(|p| space.encode(p)).collect())
    }

    pub fn decode(space: &dyn Space, v: &Value) -> Result<PointSet> {
        let Some(items) = v.as_array() else {
            return input("a point set must be a JSON array");
        };
        Ok(PointSet::new(items.iter().map(|p| space.decode(p)).collect::<Result<_>>()?))
    }
}

impl FromIterator<PointId> for PointSet {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        PointSet::new(iter.into_iter().collect())
    }
}

fn check_point(space: &dyn Space, p: PointId) -> Result<()> {
    if p >= space.len() {
        return input(format!("point {p} is outside the window"));
    }
    Ok(())
}

/// `B(x, r)`: the points within sup-distance `r` of `x`.
pub fn ball(space: &dyn Space, x: PointId, r: Scale) -> Result<PointSet> {
    check_point(space, x)?;
    Ok(PointSet::from_sorted(space.ball(x, r)))
}

/// `B(A, r)`: the `r`-neighbourhood of a set.
pub fn neighborhood(space: &dyn Space, a: &PointSet, r: Scale) -> PointSet {
    let field = space.distance_field(&a.mask(space.len()));
    PointSet::from_sorted((0..space.len()).filter(|&p| matches!(field[p], Some(d) if d <= r)).collect())
}

pub fn diameter(space: &dyn Space, s: &PointSet) -> Result<Scale> {
    if s.is_empty() {
        return input("diameter of an empty set");
    }
    Ok(space.set_diameter(s.as_slice()))
}

/// Whether consecutive points of `seq` are within `r` of each other.
pub fn is_chain(space: &dyn Space, seq: &[PointId], r: Scale) -> Result<bool> {
    if seq.is_empty() {
        return input("a chain needs at least one point");
    }
    for &p in seq {
        check_point(space, p)?;
    }
    Ok(seq.windows(2).all(|w| space.dist(w[0], w[1]) <= r))
}

/// Partition of `s` into maximal `r`-connected subsets, ordered by least element.
pub fn components(space: &dyn Space, s: &PointSet, r: Scale) -> Vec<PointSet> {
    if s.is_empty() {
        return Vec::new();
    }
    let mut local = vec![usize::MAX; space.len()];
    for (i, p) in s.iter().enumerate() {
        local[p] = i;
    }
    let mut uf = UnionFind::<usize>::new(s.len());
    for (i, p) in s.iter().enumerate() {
        for q in space.ball(p, r) {
            let j = local[q];
            if j != usize::MAX && j > i {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<PointId>> = Vec::new();
    let mut slot = vec![usize::MAX; s.len()];
    for (i, p) in s.iter().enumerate() {
        let root = uf.find(i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(p);
    }
    groups.into_iter().map(PointSet::from_sorted).collect()
}
