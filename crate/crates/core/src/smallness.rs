//! Largeness and smallness at finite scales.
//!
//! A set is large at scale `r` when its `r`-neighbourhood covers the core.
//! Smallness is tested through a φ-function: for every core point `x` some
//! `δ`-ball inside `B(x, φ(δ))` misses the set. The converse falsifier is a
//! ball of large radius inside `B(A, ε)`, showing that removing `B(A, ε)`
//! destroys largeness.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::coarse::{PointId, PointSet, Space};
use crate::error::{input, Error, Result};
use crate::scale::Scale;

/// Outcome of a largeness test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Largeness {
    pub large: bool,
    /// A core point farther than `r` from the set, when not large.
    pub uncovered: Option<PointId>,
}

/// Whether `B(a, r)` contains the core. Requires `r ≤ margin` so that
/// truncation of the window cannot fake largeness.
pub fn is_large(space: &dyn Space, a: &PointSet, r: Scale) -> Result<Largeness> {
    if r > space.margin() {
        return input(format!("radius {r} exceeds the window margin {}", space.margin()));
    }
    let field = space.distance_field(&a.mask(space.len()));
    let uncovered = (0..space.len()).find(|&x| space.in_core(x) && !field[x].is_some_and(|d| d <= r));
    Ok(Largeness { large: uncovered.is_none(), uncovered })
}

fn check_budget(space: &dyn Space, delta: Scale, phi_max: Scale) -> Result<()> {
    if delta + phi_max > space.margin() {
        return input(format!("δ + φ_max = {} exceeds the window margin {}", delta + phi_max, space.margin()));
    }
    Ok(())
}

/// The least `φ ≤ φ_max` such that every core point `x` has a point `y` with
/// `B(y, δ) ⊆ B(x, φ) ∖ a`; `None` if there is none.
///
/// Writing `G` for the centres whose `δ`-ball misses `a`, the answer is
/// `δ + max_x d(x, G)`. Requires `δ + φ_max ≤ margin`, which keeps every
/// relevant ball inside the window.
pub fn phi_witness(space: &dyn Space, a: &PointSet, delta: Scale, phi_max: Scale) -> Result<Option<Scale>> {
    check_budget(space, delta, phi_max)?;
    Ok(phi_with_witness(space, a, delta, phi_max).map(|(phi, _)| phi))
}

/// [`phi_witness`] together with the core point attaining the maximum.
fn phi_with_witness(space: &dyn Space, a: &PointSet, delta: Scale, phi_max: Scale) -> Option<(Scale, PointId)> {
    let to_a = space.distance_field(&a.mask(space.len()));
    let good: Vec<bool> = to_a.iter().map(|d| d.is_none_or(|d| d > delta)).collect();
    let to_good = space.distance_field(&good);
    let mut worst: Option<(Scale, PointId)> = None;
    for x in 0..space.len() {
        if !space.in_core(x) {
            continue;
        }
        let reach = to_good[x]? + delta;
        if reach > phi_max {
            return None;
        }
        if worst.is_none_or(|(w, _)| reach > w) {
            worst = Some((reach, x));
        }
    }
    // an empty core puts no demand on φ
    Some(worst.unwrap_or((delta, 0)))
}

/// A finite monotone table `δ ↦ φ(δ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhiTable {
    entries: BTreeMap<Scale, Scale>,
}

impl PhiTable {
    pub fn new() -> Self {
        PhiTable::default()
    }

    /// Add an entry, refusing any that breaks monotonicity.
    pub fn insert(&mut self, delta: Scale, phi: Scale) -> Result<()> {
        let below = self.entries.range(..delta).next_back();
        let above = self.entries.range(delta..).find(|(&d, _)| d > delta);
        if below.is_some_and(|(_, &p)| p > phi) || above.is_some_and(|(_, &p)| p < phi) {
            return input(format!("φ({delta}) = {phi} breaks monotonicity of the table"));
        }
        self.entries.insert(delta, phi);
        Ok(())
    }

    pub fn get(&self, delta: Scale) -> Option<Scale> {
        self.entries.get(&delta).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (Scale, Scale)> + '_ {
        self.entries.iter().map(|(&d, &p)| (d, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Re-check every entry: the least witness at `δ` must not exceed `φ(δ)`.
    pub fn verify(&self, space: &dyn Space, a: &PointSet) -> Result<bool> {
        for (d, p) in self.entries() {
            if phi_witness(space, a, d, p)?.is_none() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Sorted `[δ, φ]` pairs.
    pub fn to_json(&self) -> Value {
        Value::Array(self.entries().map(|(d, p)| json!([d, p])).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let Some(items) = v.as_array() else {
            return input("a φ table must be an array of [δ, φ] pairs");
        };
        let mut t = PhiTable::new();
        for item in items {
            let (d, p): (Scale, Scale) =
                serde_json::from_value(item.clone()).map_err(|e| Error::Input(format!("bad φ entry {item}: {e}")))?;
            t.insert(d, p)?;
        }
        Ok(t)
    }
}

/// A ball of radius `radius > eps_a` about a core point, contained in
/// `B(a, eps_a)`: the complement of `B(a, eps_a)` is not large at that radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonSmallCertificate {
    pub eps_a: Scale,
    pub center: PointId,
    pub radius: Scale,
}

impl NonSmallCertificate {
    pub fn to_json(&self, space: &dyn Space) -> Value {
        json!({
            "eps_a": self.eps_a,
            "center": space.encode(self.center),
            "radius": self.radius,
        })
    }

    /// Re-check the certificate by scanning the ball.
    pub fn holds(&self, space: &dyn Space, a: &PointSet) -> bool {
        let near_a = space.distance_field(&a.mask(space.len()));
        self.radius <= space.margin()
            && space.in_core(self.center)
            && space.ball(self.center, self.radius).into_iter().all(|y| near_a[y].is_some_and(|d| d <= self.eps_a))
    }
}

/// Look for `ε_A` in `scales` such that `core ∖ B(a, ε_A)` fails to be large
/// at radius `margin − ε_A`, which implies failure at every smaller radius.
///
/// Scales whose tested radius does not exceed `ε_A` are skipped, since a ball
/// of radius `ε_A` about a point of `a` always lies in `B(a, ε_A)`.
pub fn nonsmall_certificate(space: &dyn Space, a: &PointSet, scales: &[Scale]) -> Result<Option<NonSmallCertificate>> {
    let margin = space.margin();
    let mut sorted = scales.to_vec();
    sorted.sort();
    sorted.dedup();
    let to_a = space.distance_field(&a.mask(space.len()));
    for eps in sorted {
        let Some(radius) = margin.checked_sub(eps) else {
            return input(format!("scale {eps} exceeds the window margin {margin}"));
        };
        if radius <= eps {
            continue;
        }
        let outside: Vec<bool> = to_a.iter().map(|d| d.is_none_or(|d| d > eps)).collect();
        let to_outside = space.distance_field(&outside);
        let center = (0..space.len()).filter(|&x| space.in_core(x)).find(|&x| to_outside[x].is_none_or(|d| d > radius));
        if let Some(center) = center {
            return Ok(Some(NonSmallCertificate { eps_a: eps, center, radius }));
        }
    }
    Ok(None)
}

/// Scale-indexed smallness verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    SmallAtTestedScales(PhiTable),
    NotSmall(NonSmallCertificate),
    /// Neither side succeeded; the φ entries that were found are kept.
    Inconclusive(PhiTable),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::SmallAtTestedScales(_) => "small-at-tested-scales",
            Verdict::NotSmall(_) => "not-small",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn to_json(&self, space: &dyn Space) -> Value {
        match self {
            Verdict::SmallAtTestedScales(t) | Verdict::Inconclusive(t) => {
                json!({ "verdict": self.label(), "phi": t.to_json() })
            }
            Verdict::NotSmall(c) => {
                json!({ "verdict": self.label(), "certificate": c.to_json(space) })
            }
        }
    }
}

/// Small if a φ-witness exists at every `δ`; otherwise not small if a
/// complement certificate exists at one of the `δ`; otherwise inconclusive.
pub fn small_verdict(space: &dyn Space, a: &PointSet, deltas: &[Scale], phi_max: Scale) -> Result<Verdict> {
    let mut table = PhiTable::new();
    let mut complete = true;
    for &d in deltas {
        match phi_witness(space, a, d, phi_max)? {
            Some(p) => table.insert(d, p)?,
            None => complete = false,
        }
    }
    let cert = nonsmall_certificate(space, a, deltas)?;
    // a witness y for x at δ lies outside B(a, δ) within φ_max − δ of x, while
    // a certificate at δ keeps that ball clear up to margin − δ
    debug_assert!(!(complete && cert.is_some()));
    Ok(if complete {
        Verdict::SmallAtTestedScales(table)
    } else if let Some(c) = cert {
        Verdict::NotSmall(c)
    } else {
        Verdict::Inconclusive(table)
    })
}

/// Smallest φ-table entries for `deltas`, refusing when any is missing.
pub fn phi_table(space: &dyn Space, a: &PointSet, deltas: &[Scale], phi_max: Scale) -> Result<PhiTable> {
    let mut table = PhiTable::new();
    for &d in deltas {
        match phi_witness(space, a, d, phi_max)? {
            Some(p) => table.insert(d, p)?,
            None => {
                let worst = phi_with_witness(space, a, d, space.margin() - d).map_or_else(
                    || "no avoiding ball within the margin".to_string(),
                    |(p, _)| format!("needs φ = {p}"),
                );
                return Err(Error::Refused(format!("no φ-witness at δ = {d} up to {phi_max}: {worst}")));
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse::{neighborhood, Window};

    fn square(h: i64, margin: u32) -> Window {
        Window::lattice(&[-h, -h], &[h, h], Scale::int(margin)).unwrap()
    }

    /// Least φ by direct search over radii and centres.
    fn brute_phi(w: &Window, a: &PointSet, delta: u32, phi_max: u32) -> Option<u32> {
        (delta..=phi_max).find(|&phi| {
            w.core().iter().all(|x| {
                w.ball(x, Scale::int(phi - delta))
                    .into_iter()
                    .any(|y| w.ball(y, Scale::int(delta)).iter().all(|p| !a.contains(*p)))
            })
        })
    }

    #[test]
    fn largeness() {
        let w = Window::lattice(&[0], &[20], Scale::int(2)).unwrap();
        assert!(is_large(&w, &w.core(), Scale::ZERO).unwrap().large);
        let evens = w.select(|c| c[0] % 2 == 0);
        assert!(is_large(&w, &evens, Scale::int(1)).unwrap().large);
        let r0 = is_large(&w, &evens, Scale::ZERO).unwrap();
        assert!(!r0.large);
        assert_eq!(w.coords(r0.uncovered.unwrap())[0] % 2, 1);
        assert!(is_large(&w, &evens, Scale::int(3)).is_err());

        let sq = square(9, 3);
        let line = sq.select(|c| c[1] == 0);
        let res = is_large(&sq, &line, Scale::int(3)).unwrap();
        assert!(!res.large);
        assert!(sq.coords(res.uncovered.unwrap())[1].abs() > 3);
    }

    #[test]
    fn empty_set_has_phi_delta() {
        let w = square(8, 6);
        for d in 0..3 {
            assert_eq!(phi_witness(&w, &PointSet::empty(), Scale::int(d), Scale::int(3)).unwrap(), Some(Scale::int(d)));
        }
    }

    #[test]
    fn line_has_phi_two_delta_plus_one() {
        let w = square(14, 12);
        let line = w.select(|c| c[1] == 0);
        for d in 1..=3u32 {
            let phi = phi_witness(&w, &line, Scale::int(d), Scale::int(12 - d)).unwrap();
            assert_eq!(phi, Some(Scale::int(2 * d + 1)));
            assert_eq!(brute_phi(&w, &line, d, 12 - d), Some(2 * d + 1));
        }
        assert_eq!(phi_witness(&w, &line, Scale::int(2), Scale::int(4)).unwrap(), None);
        assert!(phi_witness(&w, &line, Scale::int(2), Scale::int(11)).is_err());
    }

    #[test]
    fn half_plane_has_no_phi() {
        let w = square(12, 6);
        let half = w.select(|c| c[1] >= 0);
        assert_eq!(phi_witness(&w, &half, Scale::int(1), Scale::int(5)).unwrap(), None);
    }

    #[test]
    fn random_sets_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let w = square(7, 5);
        for _ in 0..20 {
            let density = rng.random_range(0.02..0.3);
            let a: PointSet = (0..w.len()).filter(|_| rng.random_bool(density)).collect();
            for d in 0..2u32 {
                let got = phi_witness(&w, &a, Scale::int(d), Scale::int(5 - d)).unwrap();
                assert_eq!(got, brute_phi(&w, &a, d, 5 - d).map(Scale::int));
            }
        }
    }

    #[test]
    fn certificates() {
        let w = square(12, 6);
        let half = w.select(|c| c[1] >= 0);
        let cert = nonsmall_certificate(&w, &half, &[Scale::int(1), Scale::int(2)]).unwrap().unwrap();
        assert_eq!(cert.eps_a, Scale::int(1));
        assert_eq!(cert.radius, Scale::int(5));
        assert!(cert.holds(&w, &half));

        let point = w.select(|c| c == [0, 0]);
        assert_eq!(nonsmall_certificate(&w, &point, &[Scale::int(1), Scale::int(2)]).unwrap(), None);

        let line = Window::lattice(&[0], &[30], Scale::int(5)).unwrap();
        let evens = line.select(|c| c[0] % 2 == 0);
        let cert = nonsmall_certificate(&line, &evens, &[Scale::int(1)]).unwrap().unwrap();
        assert_eq!(cert.radius, Scale::int(4));
        assert!(cert.holds(&line, &evens));
        assert!(nonsmall_certificate(&line, &evens, &[Scale::int(6)]).is_err());
    }

    #[test]
    fn verdicts() {
        let w = square(40, 20);
        let line = w.select(|c| c[1] == 0);
        let deltas = [Scale::int(1), Scale::int(2), Scale::int(4)];
        let v = small_verdict(&w, &line, &deltas, Scale::int(15)).unwrap();
        let Verdict::SmallAtTestedScales(t) = v else { panic!("line should be small") };
        for d in [1, 2, 4] {
            assert_eq!(t.get(Scale::int(d)), Some(Scale::int(2 * d + 1)));
        }
        assert!(t.verify(&w, &line).unwrap());

        let half = w.select(|c| c[1] >= 0);
        let v = small_verdict(&w, &half, &deltas, Scale::int(15)).unwrap();
        assert_eq!(v.label(), "not-small");

        let v = small_verdict(&w, &w.core(), &deltas, Scale::int(15)).unwrap();
        assert_eq!(v.label(), "not-small");
    }

    #[test]
    fn table_monotonicity_and_json() {
        let mut t = PhiTable::new();
        t.insert(Scale::int(1), Scale::int(3)).unwrap();
        t.insert(Scale::int(4), Scale::int(9)).unwrap();
        assert!(t.insert(Scale::int(2), Scale::int(10)).is_err());
        assert!(t.insert(Scale::int(2), Scale::int(2)).is_err());
        t.insert(Scale::int(2), Scale::int(5)).unwrap();
        let v = t.to_json();
        assert_eq!(v, json!([[1, 3], [2, 5], [4, 9]]));
        assert_eq!(PhiTable::from_json(&v).unwrap(), t);
    }

    #[test]
    fn thickened_line_shifts_phi() {
        let w = square(16, 14);
        let line = w.select(|c| c[1] == 0);
        for s in 1..3u32 {
            let thick = neighborhood(&w, &line, Scale::int(s));
            for d in 1..3u32 {
                let lhs = phi_witness(&w, &thick, Scale::int(d), Scale::int(10)).unwrap().unwrap();
                let rhs = phi_witness(&w, &line, Scale::int(d + s), Scale::int(10)).unwrap().unwrap();
                assert!(lhs <= rhs);
            }
        }
    }
}
