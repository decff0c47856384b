//! Exact search for a colouring of the core with bounded monochrome components.
//!
//! The core splits into `r`-components which are coloured independently. A
//! component that is narrow enough is coloured constantly; the others go to a
//! backtracking search with incremental union-find summaries. When that search
//! runs out of budget on a planar lattice component at unit step, a row-profile
//! transfer-matrix search settles the question exactly.

use std::collections::HashMap;

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::{Certificate, Coloring};
use crate::coarse::{components, PointId, PointSet, Space};
use crate::error::{refused, Error, Result};
use crate::scale::Scale;

/// Search budget for [`asdim_oracle`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    /// Largest number of search nodes (backtracking) or profile states
    /// (transfer matrix) spent on one component before refusing.
    pub max_search: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_search: 1 << 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    /// A certified witness colouring of the core.
    Colorable(Coloring),
    /// No colouring exists; the component that cannot be coloured.
    NotColorable { component: PointSet },
}

impl OracleAnswer {
    pub fn is_colorable(&self) -> bool {
        matches!(self, OracleAnswer::Colorable(_))
    }
}

pub(super) enum Outcome {
    Found(Vec<u32>),
    Impossible,
    Budget,
}

/// Decide whether the core admits a colouring with colours `0..=n` whose
/// monochrome `r`-components all have diameter at most `d`.
pub fn asdim_oracle(space: &dyn Space, r: Scale, n: u32, d: Scale, cfg: &OracleConfig) -> Result<OracleAnswer> {
    asdim_oracle_on(space, &space.core(), r, n, d, cfg)
}

/// [`asdim_oracle`] for an arbitrary subset: chains run inside `domain`
/// only, so the answer concerns `domain` with the induced metric.
pub fn asdim_oracle_on(
    space: &dyn Space,
    domain: &PointSet,
    r: Scale,
    n: u32,
    d: Scale,
    cfg: &OracleConfig,
) -> Result<OracleAnswer> {
    let comps = components(space, domain, r);
    let results: Vec<Result<Option<Vec<u32>>>> =
        comps.par_iter().map(|comp| solve_component(space, comp, r, n, d, cfg)).collect();
    let mut chi = Coloring::new(space.len(), n);
    for (comp, res) in comps.iter().zip(results) {
        match res? {
            Some(colors) => {
                for (p, c) in comp.iter().zip(colors) {
                    chi.colors[p] = Some(c);
                }
            }
            None => return Ok(OracleAnswer::NotColorable { component: comp.clone() }),
        }
    }
    chi.certify(space, r, d).map_err(|e| Error::Refused(format!("oracle produced an invalid witness: {e}")))?;
    debug_assert_eq!(chi.certified(), Some(Certificate { r, d }));
    Ok(OracleAnswer::Colorable(chi))
}

/// Smallest `n ≤ max_n` for which [`asdim_oracle`] answers yes, with its witness.
pub fn least_palette(
    space: &dyn Space,
    r: Scale,
    d: Scale,
    max_n: u32,
    cfg: &OracleConfig,
) -> Result<Option<(u32, Coloring)>> {
    for n in 0..=max_n {
        if let OracleAnswer::Colorable(chi) = asdim_oracle(space, r, n, d, cfg)? {
            return Ok(Some((n, chi)));
        }
    }
    Ok(None)
}

fn solve_component(
    space: &dyn Space,
    comp: &PointSet,
    r: Scale,
    n: u32,
    d: Scale,
    cfg: &OracleConfig,
) -> Result<Option<Vec<u32>>> {
    let m = comp.len();
    if space.set_diameter(comp.as_slice()) <= d {
        return Ok(Some(vec![0; m]));
    }
    if n as usize + 1 >= m {
        // distinct colours make every monochrome component a single point
        return Ok(Some((0..m as u32).collect()));
    }
    let profile = Profile::new(space, comp, r, n, d);
    let dfs_budget = if profile.is_some() { cfg.max_search.min(1 << 20) } else { cfg.max_search };
    match Backtrack::new(space, comp, r, n, d).run(dfs_budget) {
        Outcome::Found(c) => return Ok(Some(c)),
        Outcome::Impossible => return Ok(None),
        Outcome::Budget => {}
    }
    match profile.map(|p| p.run(n, cfg.max_search)) {
        Some(Outcome::Found(c)) => Ok(Some(c)),
        Some(Outcome::Impossible) => Ok(None),
        _ => refused(format!("colouring search on a component of {m} points exceeded {} states", cfg.max_search)),
    }
}

/// Per-root summary of a partial monochrome component.
#[derive(Clone, Debug)]
enum Summary {
    /// Lattice bounding box in steps.
    Box { lo: Vec<i64>, hi: Vec<i64> },
    /// Members by local index.
    Members(Vec<u32>),
}

enum Undo {
    Union { child: u32, parent: u32, old_size: u32, old: Summary },
}

pub(super) struct Backtrack {
    order: Vec<PointId>,
    earlier: Vec<Vec<u32>>,
    n: u32,
    /// Diameter bound in lattice steps, when the space is a lattice box.
    box_steps: Option<i64>,
    /// Pairwise "within d" matrix for non-lattice spaces.
    close: Vec<Vec<bool>>,
    parent: Vec<u32>,
    size: Vec<u32>,
    summary: Vec<Summary>,
    color: Vec<u32>,
    undo: Vec<Undo>,
}

impl Backtrack {
    pub(super) fn new(space: &dyn Space, comp: &PointSet, r: Scale, n: u32, d: Scale) -> Self {
        let order: Vec<PointId> = comp.iter().collect();
        let m = order.len();
        let mut local = HashMap::with_capacity(m);
        for (i, &p) in order.iter().enumerate() {
            local.insert(p, i as u32);
        }
        let earlier = order
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let mut e: Vec<u32> = space
                    .ball(p, r)
                    .into_iter()
                    .filter_map(|q| local.get(&q).copied())
                    .filter(|&j| (j as usize) < i)
                    .collect();
                e.sort_unstable();
                e
            })
            .collect();
        let lattice = space.lattice();
        let box_steps =
            lattice.map(|w| (d.value() * crate::scale::qi(w.resolution() as i128)).floor().to_integer() as i64);
        let close = if lattice.is_none() {
            order.iter().map(|&a| order.iter().map(|&b| space.dist(a, b) <= d).collect()).collect()
        } else {
            Vec::new()
        };
        let summary = (0..m)
            .map(|i| match lattice {
                Some(w) => {
                    let c = w.coords(order[i]);
                    Summary::Box { lo: c.clone(), hi: c }
                }
                None => Summary::Members(vec![i as u32]),
            })
            .collect();
        Backtrack {
            order,
            earlier,
            n,
            box_steps,
            close,
            parent: (0..m as u32).collect(),
            size: vec![1; m],
            summary,
            color: vec![u32::MAX; m],
            undo: Vec::new(),
        }
    }

    fn find(&self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            i = self.parent[i as usize];
        }
        i
    }

    /// Merge two roots; false (with nothing changed) if the union is too wide.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (child, parent) = if self.size[a as usize] <= self.size[b as usize] { (a, b) } else { (b, a) };
        let merged = match (&self.summary[child as usize], &self.summary[parent as usize]) {
            (Summary::Box { lo: l1, hi: h1 }, Summary::Box { lo: l2, hi: h2 }) => {
                let steps = self.box_steps.unwrap_or(0);
                let lo: Vec<i64> = l1.iter().zip(l2).map(|(x, y)| *x.min(y)).collect();
                let hi: Vec<i64> = h1.iter().zip(h2).map(|(x, y)| *x.max(y)).collect();
                if lo.iter().zip(&hi).any(|(l, h)| h - l > steps) {
                    return false;
                }
                Summary::Box { lo, hi }
            }
            (Summary::Members(xs), Summary::Members(ys)) => {
                for &x in xs {
                    let row = &self.close[x as usize];
                    if ys.iter().any(|&y| !row[y as usize]) {
                        return false;
                    }
                }
                let mut all = ys.clone();
                all.extend_from_slice(xs);
                Summary::Members(all)
            }
            _ => unreachable!("summaries share one kind"),
        };
        let old = std::mem::replace(&mut self.summary[parent as usize], merged);
        self.undo.push(Undo::Union { child, parent, old_size: self.size[parent as usize], old });
        self.parent[child as usize] = parent;
        self.size[parent as usize] += self.size[child as usize];
        true
    }

    fn rollback(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let Undo::Union { child, parent, old_size, old } = self.undo.pop().expect("nonempty");
            self.parent[child as usize] = child;
            self.size[parent as usize] = old_size;
            self.summary[parent as usize] = old;
        }
    }

    fn assign(&mut self, i: usize, c: u32) -> bool {
        let mark = self.undo.len();
        for k in 0..self.earlier[i].len() {
            let j = self.earlier[i][k];
            if self.color[j as usize] != c {
                continue;
            }
            let (a, b) = (self.find(i as u32), self.find(j));
            if a != b && !self.union(a, b) {
                self.rollback(mark);
                return false;
            }
        }
        self.color[i] = c;
        true
    }

    pub(super) fn run(mut self, budget: u64) -> Outcome {
        let m = self.order.len();
        let mut next = vec![0u32; m + 1];
        let mut marks = vec![0usize; m];
        let mut max_used = vec![-1i64; m + 1];
        let mut nodes = 0u64;
        let mut i = 0usize;
        loop {
            if i == m {
                return Outcome::Found(self.color);
            }
            let limit = (max_used[i] + 1).min(self.n as i64) as u32;
            let mut placed = false;
            while next[i] <= limit {
                let c = next[i];
                next[i] += 1;
                nodes += 1;
                if nodes > budget {
                    return Outcome::Budget;
                }
                marks[i] = self.undo.len();
                if self.assign(i, c) {
                    max_used[i + 1] = max_used[i].max(c as i64);
                    i += 1;
                    next[i] = 0;
                    placed = true;
                    break;
                }
            }
            if !placed {
                self.color[i] = u32::MAX;
                if i == 0 {
                    return Outcome::Impossible;
                }
                i -= 1;
                self.rollback(marks[i]);
                self.color[i] = u32::MAX;
            }
        }
    }
}

const EMPTY: u8 = u8::MAX;
const PROFILE_COLORS: usize = 8;
const MAX_SLOTS: usize = 64;

/// Row-by-row transfer-matrix search over a planar lattice component whose
/// `r`-adjacency is the king-move graph.
///
/// A profile holds the colours and component labels of the last `width + 1`
/// cells, packed into one integer, together with the extent of every open
/// component. Colours are renamed by first appearance, and a profile whose
/// open components all sit inside those of another profile with the same
/// packed key replaces it.
pub(super) struct Profile {
    /// Cells of the bounding rectangle in row-major order: local index or none.
    cells: Vec<Option<usize>>,
    width: usize,
    /// Diameter bound in lattice steps.
    steps: i32,
    members: usize,
    color_bits: u32,
    label_bits: u32,
}

/// Packed extent of an open component: first row, leftmost and rightmost
/// column. Its last row is always the current one.
fn span(min_row: i32, min_col: i32, max_col: i32) -> u32 {
    (min_row as u32) << 16 | (min_col as u32) << 8 | max_col as u32
}

fn unspan(s: u32) -> (i32, i32, i32) {
    ((s >> 16) as i32, (s >> 8 & 0xff) as i32, (s & 0xff) as i32)
}

fn inside(a: u32, b: u32) -> bool {
    let (ar, al, ah) = unspan(a);
    let (br, bl, bh) = unspan(b);
    ar >= br && al >= bl && ah <= bh
}

fn dominates(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| inside(x, y))
}

/// One layer of profiles; the spans of profile `i` are
/// `arena[start[i]..start[i + 1]]`.
#[derive(Default)]
struct Layer {
    keys: Vec<u128>,
    start: Vec<u32>,
    arena: Vec<u32>,
}

impl Layer {
    fn len(&self) -> usize {
        self.keys.len()
    }

    fn spans(&self, i: usize) -> &[u32] {
        let end = self.start.get(i + 1).map_or(self.arena.len(), |&e| e as usize);
        &self.arena[self.start[i] as usize..end]
    }

    fn push(&mut self, key: u128, spans: &[u32]) {
        self.keys.push(key);
        self.start.push(self.arena.len() as u32);
        self.arena.extend_from_slice(spans);
    }
}

/// Frontier decoded from a packed key.
struct Frontier {
    colors: [u8; MAX_SLOTS],
    labels: [u8; MAX_SLOTS],
}

impl Profile {
    pub(super) fn new(space: &dyn Space, comp: &PointSet, r: Scale, n: u32, d: Scale) -> Option<Self> {
        let w = space.lattice()?;
        let qq = crate::scale::qi(w.resolution() as i128);
        let rs = (r.value() * qq).floor().to_integer();
        if rs != 1 || w.dim() > 2 || n as usize >= PROFILE_COLORS {
            return None;
        }
        let steps = (d.value() * qq).floor().to_integer();
        let coords: Vec<[i64; 2]> = comp
            .iter()
            .map(|p| {
                let c = w.coords(p);
                if c.len() == 1 {
                    [c[0], 0]
                } else {
                    [c[0], c[1]]
                }
            })
            .collect();
        let lo = [0, 1].map(|k| coords.iter().map(|c| c[k]).min().unwrap_or(0));
        let hi = [0, 1].map(|k| coords.iter().map(|c| c[k]).max().unwrap_or(0));
        let ext = [0, 1].map(|k| (hi[k] - lo[k] + 1) as usize);
        // rows run along the longer axis so the profile stays narrow
        let (row_axis, col_axis) = if ext[0] >= ext[1] { (0, 1) } else { (1, 0) };
        let width = ext[col_axis];
        let color_bits = u32::BITS - (n + 1).leading_zeros();
        let label_bits = u32::BITS - (width as u32 + 1).leading_zeros();
        let fits = (width + 1) * (color_bits + label_bits) as usize <= 128;
        if !fits || width > 255 || ext[row_axis] > u16::MAX as usize || steps > 255 {
            return None;
        }
        let mut cells = vec![None; ext[0] * ext[1]];
        for (i, c) in coords.iter().enumerate() {
            let row = (c[row_axis] - lo[row_axis]) as usize;
            let col = (c[col_axis] - lo[col_axis]) as usize;
            cells[row * width + col] = Some(i);
        }
        Some(Profile { cells, width, steps: steps as i32, members: comp.len(), color_bits, label_bits })
    }

    /// Exact answer; `budget` bounds the profiles held in one layer.
    pub(super) fn run(&self, n: u32, budget: u64) -> Outcome {
        match self.sweep(n, budget, false) {
            Sweep::Done(None) => Outcome::Impossible,
            Sweep::Done(Some(_)) => match self.sweep(n, budget, true) {
                Sweep::Done(Some(c)) => Outcome::Found(c),
                _ => unreachable!("the sweep is deterministic"),
            },
            Sweep::Budget => Outcome::Budget,
        }
    }

    fn sweep(&self, n: u32, budget: u64, record: bool) -> Sweep {
        let w = self.width;
        let mut current = Layer::default();
        current.push(0, &[]);
        let mut parents: Vec<Vec<u32>> = Vec::new();
        let mut choices_made: Vec<Vec<u8>> = Vec::new();
        let mut scratch = Vec::with_capacity(w + 1);
        let mut groups: FxHashMap<u128, u32> = FxHashMap::default();
        for (t, cell) in self.cells.iter().enumerate() {
            let (row, col) = ((t / w) as i32, t % w);
            let choices: Vec<u8> = match cell {
                None => vec![EMPTY],
                Some(_) => (0..=n as u8).collect(),
            };
            groups.clear();
            let mut next = Layer::default();
            let mut alive: Vec<bool> = Vec::new();
            let mut chain: Vec<u32> = Vec::new();
            let mut origin: Vec<(u32, u8)> = Vec::new();
            for si in 0..current.len() {
                let spans = current.spans(si);
                for &c in &choices {
                    scratch.clear();
                    let Some((key, _)) = self.place(current.keys[si], spans, row, col, c, n, &mut scratch) else {
                        continue;
                    };
                    let head = groups.get(&key).copied().unwrap_or(u32::MAX);
                    let mut j = head;
                    let mut beaten = false;
                    while j != u32::MAX {
                        let ju = j as usize;
                        if alive[ju] {
                            let other = next.spans(ju);
                            if dominates(other, &scratch) {
                                beaten = true;
                                break;
                            }
                            if dominates(&scratch, other) {
                                alive[ju] = false;
                            }
                        }
                        j = chain[ju];
                    }
                    if beaten {
                        continue;
                    }
                    groups.insert(key, next.len() as u32);
                    chain.push(head);
                    alive.push(true);
                    origin.push((si as u32, c));
                    next.push(key, &scratch);
                }
            }
            let mut kept = Layer::default();
            let mut layer_parents = Vec::new();
            let mut layer_choices = Vec::new();
            for i in 0..next.len() {
                if alive[i] {
                    kept.push(next.keys[i], next.spans(i));
                    if record {
                        layer_parents.push(origin[i].0);
                        layer_choices.push(origin[i].1);
                    }
                }
            }
            if kept.len() as u64 > budget {
                return Sweep::Budget;
            }
            if kept.len() == 0 {
                return Sweep::Done(None);
            }
            if record {
                parents.push(layer_parents);
                choices_made.push(layer_choices);
            }
            current = kept;
        }
        if !record {
            return Sweep::Done(Some(Vec::new()));
        }
        // walk back to the start, then replay forward to undo colour renaming
        let mut path = vec![0u8; self.cells.len()];
        let mut idx = 0usize;
        for t in (0..self.cells.len()).rev() {
            path[t] = choices_made[t][idx];
            idx = parents[t][idx] as usize;
        }
        let mut colors = vec![0u32; self.members];
        let mut actual: [u8; PROFILE_COLORS] = std::array::from_fn(|i| i as u8);
        let (mut key, mut spans) = (0u128, Vec::new());
        for (t, cell) in self.cells.iter().enumerate() {
            let (row, col) = ((t / w) as i32, t % w);
            let c = path[t];
            let mut out = Vec::new();
            let (next_key, relabel) =
                self.place(key, &spans, row, col, c, n, &mut out).expect("recorded path is valid");
            if let Some(i) = cell {
                colors[*i] = actual[c as usize] as u32;
            }
            let mut moved = actual;
            for x in 0..=n as usize {
                moved[relabel[x] as usize] = actual[x];
            }
            actual = moved;
            key = next_key;
            spans = out;
        }
        Sweep::Done(Some(colors))
    }

    fn decode(&self, key: u128) -> Frontier {
        let mut f = Frontier { colors: [EMPTY; MAX_SLOTS], labels: [EMPTY; MAX_SLOTS] };
        let (cb, lb) = (self.color_bits, self.label_bits);
        let (cm, lm) = ((1u128 << cb) - 1, (1u128 << lb) - 1);
        for i in 0..=self.width {
            let v = key >> (i as u32 * (cb + lb));
            let c = (v & cm) as u8;
            if c != 0 {
                f.colors[i] = c - 1;
                f.labels[i] = (v >> cb & lm) as u8;
            }
        }
        f
    }

    fn encode(&self, f: &Frontier) -> u128 {
        let (cb, lb) = (self.color_bits, self.label_bits);
        let mut key = 0u128;
        for i in 0..=self.width {
            if f.colors[i] != EMPTY {
                let v = (f.colors[i] as u128 + 1) | (f.labels[i] as u128) << cb;
                key |= v << (i as u32 * (cb + lb));
            }
        }
        key
    }

    /// Place colour `c` (or a hole) at `(row, col)`, writing the successor's
    /// spans to `out`. Returns the canonical successor key and the colour
    /// renaming applied, or `None` if a component becomes wider than the bound.
    #[allow(clippy::too_many_arguments)]
    fn place(
        &self,
        key: u128,
        spans: &[u32],
        row: i32,
        col: usize,
        c: u8,
        n: u32,
        out: &mut Vec<u32>,
    ) -> Option<(u128, [u8; PROFILE_COLORS])> {
        let w = self.width;
        let mut f = self.decode(key);
        let mut new_span = 0;
        let mut merged = [false; MAX_SLOTS];
        if c != EMPTY {
            let col_i = col as i32;
            let (mut min_row, mut min_col, mut max_col) = (row, col_i, col_i);
            let mut nbrs = [usize::MAX; 4];
            nbrs[0] = 1;
            if col > 0 {
                nbrs[1] = 0;
                nbrs[2] = w;
            }
            if col + 1 < w {
                nbrs[3] = 2;
            }
            for k in nbrs.into_iter().filter(|&k| k != usize::MAX) {
                if f.colors[k] == c && !merged[f.labels[k] as usize] {
                    merged[f.labels[k] as usize] = true;
                    let (r0, c0, c1) = unspan(spans[f.labels[k] as usize]);
                    min_row = min_row.min(r0);
                    min_col = min_col.min(c0);
                    max_col = max_col.max(c1);
                }
            }
            if row - min_row > self.steps || max_col - min_col > self.steps {
                return None;
            }
            new_span = span(min_row, min_col, max_col);
        }
        // shift the frontier by one cell; the new cell gets a fresh label
        let fresh = MAX_SLOTS as u8 - 1;
        for i in 0..w {
            f.colors[i] = f.colors[i + 1];
            f.labels[i] = f.labels[i + 1];
            if f.colors[i] != EMPTY && merged[f.labels[i] as usize] {
                f.labels[i] = fresh;
            }
        }
        f.colors[w] = c;
        f.labels[w] = if c == EMPTY { EMPTY } else { fresh };
        let mut labels = [EMPTY; MAX_SLOTS];
        let mut relabel = [EMPTY; PROFILE_COLORS];
        let mut used = 0u8;
        for i in 0..=w {
            if f.colors[i] == EMPTY {
                continue;
            }
            let old = f.labels[i] as usize;
            if labels[old] == EMPTY {
                labels[old] = out.len() as u8;
                out.push(if old == fresh as usize { new_span } else { spans[old] });
            }
            f.labels[i] = labels[old];
            let color = f.colors[i] as usize;
            if relabel[color] == EMPTY {
                relabel[color] = used;
                used += 1;
            }
            f.colors[i] = relabel[color];
        }
        for x in relabel.iter_mut().take(n as usize + 1) {
            if *x == EMPTY {
                *x = used;
                used += 1;
            }
        }
        Some((self.encode(&f), relabel))
    }
}

enum Sweep {
    Done(Option<Vec<u32>>),
    Budget,
}
