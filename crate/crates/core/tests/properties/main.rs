mod cayley;
mod coarse;
mod coloring;
mod smallness;
mod triangulation;

use coarsekit::{PointId, PointSet, Scale, Space, Window};
use proptest::prelude::*;

/// A small planar lattice window with its core and a random subset.
#[derive(Clone, Debug)]
pub struct Slice {
    pub w: Window,
    pub set: PointSet,
}

pub fn window_strategy(max_side: i64, max_margin: u32) -> impl Strategy<Value = Window> {
    (1..=max_side, 1..=max_side, 0..=max_margin)
        .prop_map(|(a, b, m)| Window::lattice(&[0, 0], &[a, b], Scale::int(m)).unwrap())
}

pub fn slice_strategy(max_side: i64, max_margin: u32) -> impl Strategy<Value = Slice> {
    window_strategy(max_side, max_margin).prop_flat_map(|w| {
        let len = w.len();
        proptest::collection::vec(any::<bool>(), len)
            .prop_map(move |bits| Slice { w: w.clone(), set: (0..len).filter(|&p| bits[p]).collect() })
    })
}

/// Connected components by repeated relaxation of a reachability matrix.
pub fn closure_components(space: &dyn Space, s: &PointSet, r: Scale) -> Vec<Vec<PointId>> {
    let pts: Vec<PointId> = s.iter().collect();
    let k = pts.len();
    let mut reach = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            reach[i][j] = space.dist(pts[i], pts[j]) <= r;
        }
    }
    for m in 0..k {
        for i in 0..k {
            if reach[i][m] {
                for j in 0..k {
                    if reach[m][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<PointId>> = Vec::new();
    let mut done = vec![false; k];
    for i in 0..k {
        if done[i] {
            continue;
        }
        let comp: Vec<PointId> = (0..k).filter(|&j| reach[i][j]).inspect(|&j| done[j] = true).map(|j| pts[j]).collect();
        out.push(comp);
    }
    out
}
