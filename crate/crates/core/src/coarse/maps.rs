use serde::Serialize;

use super::{PointId, Space};
use crate::scale::Scale;

const MAX_REPORTED: usize = 16;

/// A finite map between two windows together with the bounds it is claimed
/// to satisfy.
#[derive(Clone, Debug)]
pub struct CoarseMapCheck {
    /// Image of every source point (`None` where undefined).
    pub map: Vec<Option<PointId>>,
    /// Bound on the displacement of the composite with a coarse inverse.
    pub slack: Scale,
    /// Pairs `(s, t)`: points at distance `<= s` must map to points at distance `<= t`.
    pub modulus: Vec<(Scale, Scale)>,
}

impl CoarseMapCheck {
    pub fn from_fn(src: &dyn Space, f: impl Fn(PointId) -> Option<PointId>) -> Self {
        CoarseMapCheck { map: (0..src.len()).map(f).collect(), slack: Scale::ZERO, modulus: Vec::new() }
    }

    pub fn with_slack(mut self, slack: Scale) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_modulus(mut self, pairs: &[(Scale, Scale)]) -> Self {
        self.modulus.extend_from_slice(pairs);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModulusViolation {
    pub input: Scale,
    pub output: Scale,
    pub x: PointId,
    pub y: PointId,
    pub image_distance: Scale,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MapReport {
    pub passed: bool,
    /// Core points where the map is undefined.
    pub undefined_on_core: Vec<PointId>,
    pub pairs_checked: usize,
    pub violation_count: usize,
    /// The first few violating pairs.
    pub violations: Vec<ModulusViolation>,
}

/// Exhaustively checks every modulus pair over the source core.
pub fn check_coarse_map(src: &dyn Space, dst: &dyn Space, chk: &CoarseMapCheck) -> MapReport {
    let mut report = MapReport::default();
    let core: Vec<PointId> = (0..src.len()).filter(|&p| src.in_core(p)).collect();
    for &x in &core {
        if chk.map.get(x).copied().flatten().is_none() {
            report.undefined_on_core.push(x);
        }
    }
    for &(s, t) in &chk.modulus {
        for &x in &core {
            let Some(fx) = chk.map.get(x).copied().flatten() else { continue };
            for y in src.ball(x, s) {
                if y <= x || !src.in_core(y) {
                    continue;
                }
                let Some(fy) = chk.map.get(y).copied().flatten() else { continue };
                report.pairs_checked += 1;
                let d = dst.dist(fx, fy);
                if d > t {
                    report.violation_count += 1;
                    if report.violations.len() < MAX_REPORTED {
                        report.violations.push(ModulusViolation { input: s, output: t, x, y, image_distance: d });
                    }
                }
            }
        }
    }
    report.passed = report.undefined_on_core.is_empty() && report.violation_count == 0;
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DisplacementViolation {
    /// `"source"` for `x` vs `g(f(x))`, `"target"` for `y` vs `f(g(y))`.
    pub side: &'static str,
    pub point: PointId,
    /// Distance to the round-trip image, or `None` if the round trip is undefined.
    pub displacement: Option<Scale>,
    pub slack: Scale,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub passed: bool,
    pub forward: MapReport,
    pub backward: MapReport,
    pub displacement_violation_count: usize,
    pub displacements: Vec<DisplacementViolation>,
}

/// Checks `fwd: X -> Y` and `bwd: Y -> X` as mutually coarse-inverse maps:
/// both moduli, and both round-trip displacements on the cores.
pub fn check_coarse_equivalence(
    x: &dyn Space,
    y: &dyn Space,
    fwd: &CoarseMapCheck,
    bwd: &CoarseMapCheck,
) -> EquivalenceReport {
    let forward = check_coarse_map(x, y, fwd);
    let backward = check_coarse_map(y, x, bwd);
    let mut count = 0;
    let mut displacements = Vec::new();
    let mut round_trip = |space: &dyn Space, there: &CoarseMapCheck, back: &CoarseMapCheck, side| {
        for p in 0..space.len() {
            if !space.in_core(p) {
                continue;
            }
            let image = there.map.get(p).copied().flatten();
            let back_image = image.and_then(|i| back.map.get(i).copied().flatten());
            let displacement = back_image.map(|b| space.dist(p, b));
            if displacement.is_none_or(|d| d > there.slack) {
                count += 1;
                if displacements.len() < MAX_REPORTED {
                    displacements.push(DisplacementViolation { side, point: p, displacement, slack: there.slack });
                }
            }
        }
    };
    round_trip(x, fwd, bwd, "source");
    round_trip(y, bwd, fwd, "target");
    EquivalenceReport {
        passed: forward.passed && backward.passed && count == 0,
        forward,
        backward,
        displacement_violation_count: count,
        displacements,
    }
}
