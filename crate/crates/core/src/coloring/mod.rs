//! Colourings as witnesses of asymptotic dimension.
//!
//! A colouring with `n + 1` colours witnesses `asdim ≤ n` at scale `r` with
//! bound `d` when every monochrome `r`-chain has diameter at most `d`. Chains
//! are never enumerated: a monochrome chain lies inside a monochrome
//! `r`-component, so the least such `d` is the widest component of a colour
//! class.

mod oracle;

pub use oracle::{asdim_oracle, asdim_oracle_on, least_palette, OracleAnswer, OracleConfig};

use serde_json::{json, Value};

use crate::coarse::{components, mesh, Cover, Part, PointId, PointSet, Space};
use crate::error::{input, Error, Result};
use crate::scale::Scale;

/// Certified statement: every monochrome `r`-chain has diameter at most `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub r: Scale,
    pub d: Scale,
}

/// A partial map from the points of a space to colours `0..=n`.
///
/// The domain is usually the core of the space; merged colourings are built
/// from colourings of complementary subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<Option<u32>>,
    n: u32,
    certified: Option<Certificate>,
}

impl Coloring {
    /// Colouring of nothing, on a space with `len` points, with palette `0..=n`.
    pub fn new(len: usize, n: u32) -> Self {
        Coloring { colors: vec![None; len], n, certified: None }
    }

    /// Colour every point of `domain` by `f`.
    pub fn from_fn(len: usize, n: u32, domain: &PointSet, mut f: impl FnMut(PointId) -> u32) -> Result<Self> {
        let mut c = Coloring::new(len, n);
        for p in domain.iter() {
            c.set(p, f(p))?;
        }
        Ok(c)
    }

    pub fn set(&mut self, p: PointId, color: u32) -> Result<()> {
        if color > self.n {
            return input(format!("colour {color} exceeds palette 0..={}", self.n));
        }
        let Some(slot) = self.colors.get_mut(p) else {
            return input(format!("point {p} is outside the space"));
        };
        *slot = Some(color);
        self.certified = None;
        Ok(())
    }

    pub fn get(&self, p: PointId) -> Option<u32> {
        self.colors.get(p).copied().flatten()
    }

    /// Highest admissible colour; the palette has `n + 1` colours.
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn space_len(&self) -> usize {
        self.colors.len()
    }

    pub fn certified(&self) -> Option<Certificate> {
        self.certified
    }

    pub fn domain(&self) -> PointSet {
        PointSet::new((0..self.colors.len()).filter(|&p| self.colors[p].is_some()).collect())
    }

    pub fn class(&self, color: u32) -> PointSet {
        PointSet::new((0..self.colors.len()).filter(|&p| self.colors[p] == Some(color)).collect())
    }

    /// First core point without a colour.
    pub fn uncolored_core_point(&self, space: &dyn Space) -> Option<PointId> {
        (0..space.len()).find(|&p| space.in_core(p) && self.get(p).is_none())
    }

    /// Re-check `(r, d)` exhaustively and record it on success.
    pub fn certify(&mut self, space: &dyn Space, r: Scale, d: Scale) -> Result<()> {
        self.check_space(space)?;
        let measured = max_mono_component_diameter(space, self, r);
        if measured > d {
            return input(format!("certificate fails: a monochrome {r}-component has diameter {measured} > {d}"));
        }
        self.certified = Some(Certificate { r, d });
        Ok(())
    }

    fn check_space(&self, space: &dyn Space) -> Result<()> {
        if self.colors.len() != space.len() {
            return input(format!("colouring is for a space of {} points, not {}", self.colors.len(), space.len()));
        }
        Ok(())
    }

    /// `{n, colors: [[point, color], ...], certified: {r, d}?}`
    pub fn to_json(&self, space: &dyn Space) -> Value {
        let colors: Vec<Value> =
            (0..self.colors.len()).filter_map(|p| self.colors[p].map(|c| json!([space.encode(p), c]))).collect();
        let mut v = json!({ "n": self.n, "colors": colors });
        if let Some(c) = self.certified {
            v["certified"] = json!({ "r": c.r, "d": c.d });
        }
        v
    }

    /// Parse a colouring; a `certified` field is re-checked before it is kept.
    pub fn from_json(space: &dyn Space, v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Input("a colouring needs a nonnegative integer \"n\"".into()))?;
        let n = u32::try_from(n).map_err(|_| Error::Input(format!("palette size {n} too large")))?;
        let Some(items) = v.get("colors").and_then(Value::as_array) else {
            return input("a colouring needs a \"colors\" array");
        };
        let mut c = Coloring::new(space.len(), n);
        for item in items {
            let pair = item
                .as_array()
                .filter(|a| a.len() == 2)
                .ok_or_else(|| Error::Input(format!("expected [point, colour], got {item}")))?;
            let p = space.decode(&pair[0])?;
            let color = pair[1].as_u64().ok_or_else(|| Error::Input(format!("bad colour {}", pair[1])))?;
            if c.get(p).is_some() {
                return input(format!("point {} coloured twice", pair[0]));
            }
            c.set(p, color as u32)?;
        }
        if let Some(cert) = v.get("certified").filter(|x| !x.is_null()) {
            let r: Scale = parse_field(cert, "r")?;
            let d: Scale = parse_field(cert, "d")?;
            c.certify(space, r, d)?;
        }
        Ok(c)
    }
}

fn parse_field(v: &Value, key: &str) -> Result<Scale> {
    let f = v.get(key).ok_or_else(|| Error::Input(format!("certificate lacks {key:?}")))?;
    serde_json::from_value(f.clone()).map_err(|e| Error::Input(format!("bad scale in {key:?}: {e}")))
}

/// Widest monochrome `r`-component: `(diameter, colour, component)`.
pub fn widest_mono_component(space: &dyn Space, chi: &Coloring, r: Scale) -> Option<(Scale, u32, PointSet)> {
    let mut best: Option<(Scale, u32, PointSet)> = None;
    for color in 0..=chi.n {
        let class = chi.class(color);
        for comp in components(space, &class, r) {
            let d = space.set_diameter(comp.as_slice());
            if best.as_ref().is_none_or(|b| d > b.0) {
                best = Some((d, color, comp));
            }
        }
    }
    best
}

/// The least `d` such that every monochrome `r`-chain has diameter `≤ d`.
pub fn max_mono_component_diameter(space: &dyn Space, chi: &Coloring, r: Scale) -> Scale {
    widest_mono_component(space, chi, r).map_or(Scale::ZERO, |b| b.0)
}

/// One part per monochrome `r`-component, in the family of its colour.
///
/// Parts are labelled `"c<colour>.<k>"`, numbered by least element.
pub fn coloring_to_cover(space: &dyn Space, chi: &Coloring, r: Scale) -> Cover {
    let mut parts = Vec::new();
    for color in 0..=chi.n {
        for (k, comp) in components(space, &chi.class(color), r).into_iter().enumerate() {
            parts.push(Part { label: format!("c{color}.{k}"), points: comp, family: Some(color as usize) });
        }
    }
    Cover::new(parts).expect("labels are distinct")
}

/// Colour each core point by the family of the first part containing it.
pub fn cover_to_coloring(space: &dyn Space, c: &Cover) -> Result<Coloring> {
    let mut families = Vec::with_capacity(c.len());
    for part in c.parts() {
        match part.family {
            Some(f) => families.push(f as u32),
            None => return input(format!("cover part {:?} has no family index", part.label)),
        }
    }
    let n = families.iter().copied().max().unwrap_or(0);
    let mut chi = Coloring::new(space.len(), n);
    for (part, &f) in c.parts().iter().zip(&families).rev() {
        for p in part.points.iter() {
            if p < space.len() && space.in_core(p) {
                chi.colors[p] = Some(f);
            }
        }
    }
    if let Some(p) = chi.uncolored_core_point(space) {
        return input(format!("core point {} is covered by no part", space.encode(p)));
    }
    Ok(chi)
}

/// Outcome of the multiplicity-to-colouring construction.
#[derive(Clone, Debug)]
pub struct MultiplicityColoring {
    /// Certified at `(r, bound)` exactly when `measured ≤ bound`.
    pub coloring: Coloring,
    pub mesh: Scale,
    /// `mesh + (n + 1)·r`.
    pub bound: Scale,
    /// Widest monochrome `r`-component of the produced colouring.
    pub measured: Scale,
    pub witness: Option<PointSet>,
}

impl MultiplicityColoring {
    pub fn holds(&self) -> bool {
        self.measured <= self.bound
    }
}

/// Colour `x` by the largest `k ≤ n` for which the ball `B(x, (k+1)·r)` meets
/// exactly `k + 1` parts.
///
/// Requires every `(n+1)·r`-ball about a core point to meet at most `n + 1`
/// parts. The produced colouring is re-checked against `mesh + (n+1)·r` and
/// carries that certificate only if the check passes; see
/// [`MultiplicityColoring`].
pub fn multiplicity_to_coloring(space: &dyn Space, c: &Cover, r: Scale, n: u32) -> Result<MultiplicityColoring> {
    let reach = r * (n + 1);
    let index = c.membership(space.len());
    let mut chi = Coloring::new(space.len(), n);
    let mut nearest = vec![None::<Scale>; c.len()];
    let mut touched = Vec::new();
    for x in 0..space.len() {
        if !space.in_core(x) {
            continue;
        }
        if index[x].is_empty() {
            return input(format!("core point {} is covered by no part", space.encode(x)));
        }
        for y in space.ball(x, reach) {
            let dy = space.dist(x, y);
            for &part in &index[y] {
                let slot = &mut nearest[part as usize];
                match slot {
                    None => {
                        *slot = Some(dy);
                        touched.push(part as usize);
                    }
                    Some(d) if dy < *d => *d = dy,
                    _ => {}
                }
            }
        }
        if touched.len() > n as usize + 1 {
            return input(format!(
                "the {reach}-ball about {} meets {} parts, more than {}",
                space.encode(x),
                touched.len(),
                n + 1
            ));
        }
        let mut color = None;
        for k in (0..=n).rev() {
            let radius = r * (k + 1);
            let count = touched.iter().filter(|&&i| nearest[i].is_some_and(|d| d <= radius)).count();
            if count == k as usize + 1 {
                color = Some(k);
                break;
            }
        }
        for &i in &touched {
            nearest[i] = None;
        }
        touched.clear();
        // count(k) - (k+1) starts ≥ 0, ends ≤ 0 and drops by at most one per step
        chi.colors[x] = Some(color.expect("some k attains count k + 1"));
    }
    let mesh = mesh(space, c)?;
    let bound = mesh + reach;
    let widest = widest_mono_component(space, &chi, r);
    let measured = widest.as_ref().map_or(Scale::ZERO, |b| b.0);
    let witness = widest.filter(|b| b.0 > bound).map(|b| b.2);
    if measured <= bound {
        chi.certified = Some(Certificate { r, d: bound });
    }
    Ok(MultiplicityColoring { coloring: chi, mesh, bound, measured, witness })
}

/// Merge colourings of disjoint sets `A` and `B`.
///
/// `χA` must be certified at scale `r` with bound `dA` and `χB` at scale
/// `2r + dA` with bound `dB`; the result is certified at `(r, 2dA + 2r + dB)`.
/// A certificate at a larger scale also counts, since `r`-components only
/// shrink as `r` decreases.
pub fn merge_colorings(space: &dyn Space, chi_a: &Coloring, chi_b: &Coloring, r: Scale) -> Result<Coloring> {
    chi_a.check_space(space)?;
    chi_b.check_space(space)?;
    let Some(ca) = chi_a.certified else {
        return input("the colouring of A carries no certificate");
    };
    let Some(cb) = chi_b.certified else {
        return input("the colouring of B carries no certificate");
    };
    if ca.r < r {
        return input(format!("the colouring of A is certified at {} < {r}", ca.r));
    }
    let need = r * 2 + ca.d;
    if cb.r < need {
        return input(format!("the colouring of B is certified at {} but needs scale 2r + dA = {need}", cb.r));
    }
    let mut merged = Coloring::new(space.len(), chi_a.n.max(chi_b.n));
    for p in 0..space.len() {
        merged.colors[p] = match (chi_a.get(p), chi_b.get(p)) {
            (Some(_), Some(_)) => return input(format!("point {} lies in both domains", space.encode(p))),
            (a, b) => a.or(b),
        };
    }
    let bound = ca.d * 2 + r * 2 + cb.d;
    debug_assert!(max_mono_component_diameter(space, &merged, r) <= bound);
    merged.certified = Some(Certificate { r, d: bound });
    Ok(merged)
}

#[cfg(test)]
use oracle::{Backtrack, Outcome, Profile};

#[cfg(test)]
mod tests;
