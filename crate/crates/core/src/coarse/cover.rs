use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::{PointId, PointSet, Space};
use crate::error::{input, Result};
use crate::scale::Scale;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub label: String,
    pub points: PointSet,
    /// Colour family the part belongs to, if the cover is coloured.
    pub family: Option<usize>,
}

/// A labelled family of point sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cover {
    parts: Vec<Part>,
}

impl Cover {
    pub fn new(parts: Vec<Part>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &parts {
            if !seen.insert(p.label.as_str()) {
                return input(format!("duplicate cover label {:?}", p.label));
            }
        }
        Ok(Cover { parts })
    }

    /// Unlabelled parts get labels `"0"`, `"1"`, ...
    pub fn from_sets(sets: Vec<PointSet>) -> Self {
        Cover {
            parts: sets
                .into_iter()
                .enumerate()
                .map(|(i, points)| Part { label: i.to_string(), points, family: None })
                .collect(),
        }
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// For every point, the indices of the parts containing it.
    pub fn membership(&self, len: usize) -> Vec<Vec<u32>> {
        let mut index = vec![Vec::new(); len];
        for (i, part) in self.parts.iter().enumerate() {
            for p in part.points.iter() {
                index[p].push(i as u32);
            }
        }
        index
    }

    /// First core point covered by no part, if any.
    pub fn uncovered_core_point(&self, space: &dyn Space) -> Option<PointId> {
        let index = self.membership(space.len());
        (0..space.len()).find(|&p| space.in_core(p) && index[p].is_empty())
    }

    pub fn to_json(&self, space: &dyn Space) -> Value {
        let parts: Vec<Value> = self
            .parts
            .iter()
            .map(|p| {
                let mut v = json!({ "label": p.label, "points": p.points.encode(space) });
                if let Some(f) = p.family {
                    v["family"] = json!(f);
                }
                v
            })
            .collect();
        json!({ "parts": parts })
    }

    pub fn from_json(space: &dyn Space, v: &Value) -> Result<Self> {
        let Some(parts) = v.get("parts").and_then(Value::as_array) else {
            return input("a cover needs a \"parts\" array");
        };
        let parts = parts
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let label = match p.get("label") {
                    Some(Value::String(s)) => s.clone(),
                    Some(other) => other.to_string(),
                    None => i.to_string(),
                };
                let points = PointSet::decode(space, p.get("points").unwrap_or(&Value::Null))?;
                let family = match p.get("family") {
                    None | Some(Value::Null) => None,
                    Some(f) => {
                        Some(f.as_u64().ok_or_else(|| crate::error::Error::Input(format!("bad family index {f}")))?
                            as usize)
                    }
                };
                Ok(Part { label, points, family })
            })
            .collect::<Result<Vec<_>>>()?;
        Cover::new(parts)
    }
}

/// Largest number of parts met by an `r`-ball about a core point, with a
/// core point attaining it.
pub fn cover_multiplicity_at(space: &dyn Space, c: &Cover, r: Scale) -> Result<(usize, PointId)> {
    let index = c.membership(space.len());
    let mut best: Option<(usize, PointId)> = None;
    let mut stamp = vec![usize::MAX; c.len()];
    for x in 0..space.len() {
        if !space.in_core(x) {
            continue;
        }
        if index[x].is_empty() {
            return input(format!("cover does not cover the core: point {} is in no part", space.encode(x)));
        }
        let mut count = 0;
        for y in space.ball(x, r) {
            for &part in &index[y] {
                if stamp[part as usize] != x {
                    stamp[part as usize] = x;
                    count += 1;
                }
            }
        }
        if best.is_none_or(|(m, _)| count > m) {
            best = Some((count, x));
        }
    }
    match best {
        Some(b) => Ok(b),
        None => input("window core is empty"),
    }
}

/// Largest diameter of a part.
pub fn mesh(space: &dyn Space, c: &Cover) -> Result<Scale> {
    let mut m = Scale::ZERO;
    for p in c.parts() {
        if p.points.is_empty() {
            return input(format!("cover part {:?} is empty", p.label));
        }
        m = m.max(space.set_diameter(p.points.as_slice()));
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::Window;

    fn blocks(w: &Window, width: i64) -> Cover {
        let (lo, hi) = w.numer_bounds();
        let (lo, hi) = (lo[0], hi[0]);
        let mut sets = Vec::new();
        let mut start = lo.div_euclid(width) * width;
        while start <= hi {
            let s = w.select(|c| c[0] >= start && c[0] < start + width);
            if !s.is_empty() {
                sets.push(s);
            }
            start += width;
        }
        Cover::from_sets(sets)
    }

    #[test]
    fn interval_blocks() {
        let w = Window::lattice(&[0], &[49], Scale::int(2)).unwrap();
        let c = blocks(&w, 10);
        assert_eq!(cover_multiplicity_at(&w, &c, Scale::int(1)).unwrap().0, 2);
        assert_eq!(cover_multiplicity_at(&w, &c, Scale::ZERO).unwrap().0, 1);
        assert_eq!(mesh(&w, &c).unwrap(), Scale::int(9));
    }

    #[test]
    fn brick_cover_multiplicity_matches_enumeration() {
        // bricks 4 wide and 2 tall, alternate rows offset by 2
        let w = Window::lattice(&[0, 0], &[15, 15], Scale::int(1)).unwrap();
        let brick = |c: &[i64]| {
            let row = c[1].div_euclid(2);
            let shift = if row % 2 == 0 { 0 } else { 2 };
            (row, (c[0] + shift).div_euclid(4))
        };
        let mut keys: Vec<(i64, i64)> = (0..w.len()).map(|p| brick(&w.coords(p))).collect();
        keys.sort();
        keys.dedup();
        let sets: Vec<PointSet> = keys.iter().map(|k| w.select(|c| brick(c) == *k)).collect();
        let c = Cover::from_sets(sets);
        // brute force: collect labels seen in each core ball
        let mut expect = 0;
        for x in w.core().iter() {
            let mut seen: Vec<(i64, i64)> = w.ball(x, Scale::int(1)).into_iter().map(|y| brick(&w.coords(y))).collect();
            seen.sort();
            seen.dedup();
            expect = expect.max(seen.len());
        }
        assert_eq!(expect, 3);
        assert_eq!(cover_multiplicity_at(&w, &c, Scale::int(1)).unwrap().0, expect);
    }

    #[test]
    fn relabeling_and_reordering_do_not_change_multiplicity() {
        let w = Window::lattice(&[0], &[29], Scale::int(1)).unwrap();
        let c = blocks(&w, 7);
        let mut parts = c.parts().to_vec();
        parts.reverse();
        for (i, p) in parts.iter_mut().enumerate() {
            p.label = format!("part-{i}");
        }
        let d = Cover::new(parts).unwrap();
        for r in 0..4 {
            assert_eq!(
                cover_multiplicity_at(&w, &c, Scale::int(r)).unwrap().0,
                cover_multiplicity_at(&w, &d, Scale::int(r)).unwrap().0
            );
        }
    }

    #[test]
    fn errors() {
        let w = Window::lattice(&[0], &[9], Scale::ZERO).unwrap();
        let partial = Cover::from_sets(vec![w.select(|c| c[0] < 5)]);
        assert!(cover_multiplicity_at(&w, &partial, Scale::int(1)).is_err());
        assert_eq!(partial.uncovered_core_point(&w), w.id_of(&[5]));
        let with_empty = Cover::from_sets(vec![PointSet::empty()]);
        assert!(mesh(&w, &with_empty).is_err());
        let dup = Cover::new(vec![
            Part { label: "a".into(), points: PointSet::empty(), family: None },
            Part { label: "a".into(), points: PointSet::empty(), family: None },
        ]);
        assert!(dup.is_err());
    }

    #[test]
    fn json_round_trip() {
        let w = Window::lattice(&[0], &[9], Scale::ZERO).unwrap();
        let mut c = blocks(&w, 5);
        let mut parts = c.parts().to_vec();
        parts[1].family = Some(1);
        c = Cover::new(parts).unwrap();
        let back = Cover::from_json(&w, &c.to_json(&w)).unwrap();
        assert_eq!(back, c);
    }
}
