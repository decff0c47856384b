//! Word-metric balls of ℤⁿ, free groups and lamplighter groups `ℤ_m ≀ ℤ`.
//!
//! A [`GroupWindow`] is the ball of radius `R` about the identity with the
//! left-invariant word metric `d(x, y) = |x⁻¹y|`. All three families have
//! closed-form word lengths, so distances are exact for every pair.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::coarse::{components, PointId, PointSet, Space};
use crate::coloring::{asdim_oracle_on, Certificate, Coloring, OracleAnswer, OracleConfig};
use crate::error::{input, refused, Error, Result};
use crate::scale::Scale;
use crate::smallness::{small_verdict, Verdict};

/// Default cap on the number of elements in a window.
pub const MAX_GROUP_WINDOW: usize = 4096;

/// One of the preset groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    /// `ℤⁿ` with generators `±e_i`.
    FreeAbelian(usize),
    /// The free group on `k` letters `a, b, c, …`.
    Free(usize),
    /// `ℤ_m ≀ ℤ` with the translation `t` and the lamp toggle `a` at the origin.
    Lamplighter(u32),
}

/// A group element in normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Vector(Vec<i64>),
    /// Reduced word; letter `±(i+1)` is the `i`-th generator or its inverse.
    Word(Vec<i32>),
    /// Nonzero lamp values by position, and the translation part.
    Lamps {
        lamps: BTreeMap<i64, u32>,
        pos: i64,
    },
}

impl GroupSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GroupSpec::FreeAbelian(0) | GroupSpec::Free(0) => input("a preset group needs at least one generator"),
            GroupSpec::Free(k) if k > 26 => input("free groups are limited to 26 letters"),
            GroupSpec::Lamplighter(m) if m < 2 => input("lamplighter lamps need at least 2 states"),
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> Element {
        match *self {
            GroupSpec::FreeAbelian(n) => Element::Vector(vec![0; n]),
            GroupSpec::Free(_) => Element::Word(Vec::new()),
            GroupSpec::Lamplighter(_) => Element::Lamps { lamps: BTreeMap::new(), pos: 0 },
        }
    }

    /// The symmetric generating set, identity excluded.
    pub fn generators(&self) -> Vec<Element> {
        match *self {
            GroupSpec::FreeAbelian(n) => (0..n)
                .flat_map(|i| {
                    [1, -1].map(|s| {
                        let mut v = vec![0; n];
                        v[i] = s;
                        Element::Vector(v)
                    })
                })
                .collect(),
            GroupSpec::Free(k) => {
                (1..=k as i32).flat_map(|i| [Element::Word(vec![i]), Element::Word(vec![-i])]).collect()
            }
            GroupSpec::Lamplighter(m) => {
                let lamp = |v: u32| Element::Lamps { lamps: BTreeMap::from([(0, v)]), pos: 0 };
                let mut g = vec![
                    Element::Lamps { lamps: BTreeMap::new(), pos: 1 },
                    Element::Lamps { lamps: BTreeMap::new(), pos: -1 },
                    lamp(1),
                ];
                if m > 2 {
                    g.push(lamp(m - 1));
                }
                g
            }
        }
    }

    fn check(&self, x: &Element) -> Result<()> {
        let ok = match (self, x) {
            (GroupSpec::FreeAbelian(n), Element::Vector(v)) => v.len() == *n,
            (GroupSpec::Free(k), Element::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *k) && w.windows(2).all(|p| p[0] != -p[1])
            }
            (GroupSpec::Lamplighter(m), Element::Lamps { lamps, .. }) => lamps.values().all(|&v| v > 0 && v < *m),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            input(format!("{x:?} is not a normal form of {self}"))
        }
    }

    /// Group product. For the lamplighter this is
    /// `((a_i), n) · ((b_i), m) = ((a_{i+m} + b_i), n + m)`.
    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        match (self, x, y) {
            (GroupSpec::FreeAbelian(_), Element::Vector(a), Element::Vector(b)) => {
                Element::Vector(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            (GroupSpec::Free(_), Element::Word(a), Element::Word(b)) => {
                let mut out = a.clone();
                for &l in b {
                    if out.last() == Some(&-l) {
                        out.pop();
                    } else {
                        out.push(l);
                    }
                }
                Element::Word(out)
            }
            (GroupSpec::Lamplighter(m), Element::Lamps { lamps: fa, pos: n }, Element::Lamps { lamps: fb, pos: k }) => {
                let mut out: BTreeMap<i64, u32> = fa.iter().map(|(&i, &v)| (i - k, v)).collect();
                for (&i, &v) in fb {
                    let e = out.entry(i).or_insert(0);
                    *e = (*e + v) % m;
                    if *e == 0 {
                        out.remove(&i);
                    }
                }
                Element::Lamps { lamps: out, pos: n + k }
            }
            _ => panic!("elements of different groups"),
        }
    }

    pub fn inverse(&self, x: &Element) -> Element {
        match (self, x) {
            (GroupSpec::FreeAbelian(_), Element::Vector(a)) => Element::Vector(a.iter().map(|v| -v).collect()),
            (GroupSpec::Free(_), Element::Word(w)) => Element::Word(w.iter().rev().map(|l| -l).collect()),
            (GroupSpec::Lamplighter(m), Element::Lamps { lamps, pos }) => {
                Element::Lamps { lamps: lamps.iter().map(|(&i, &v)| (i + pos, m - v)).collect(), pos: -pos }
            }
            _ => panic!("element of a different group"),
        }
    }

    /// Word length with respect to [`GroupSpec::generators`].
    pub fn word_length(&self, x: &Element) -> u64 {
        match (self, x) {
            (GroupSpec::FreeAbelian(_), Element::Vector(a)) => a.iter().map(|v| v.unsigned_abs()).sum(),
            (GroupSpec::Free(_), Element::Word(w)) => w.len() as u64,
            (GroupSpec::Lamplighter(m), Element::Lamps { lamps, pos }) => {
                // lamp at stored position i was switched while the cursor stood at i + pos
                let toggles: u64 = lamps.values().map(|&v| v.min(m - v) as u64).sum();
                let sites = lamps.keys().map(|i| i + pos);
                let lo = sites.clone().chain([0, *pos]).min().unwrap_or(0);
                let hi = sites.chain([0, *pos]).max().unwrap_or(0);
                let left_first = -lo + (hi - lo) + (hi - pos);
                let right_first = hi + (hi - lo) + (pos - lo);
                toggles + left_first.min(right_first) as u64
            }
            _ => panic!("element of a different group"),
        }
    }

    /// `|x⁻¹y|`.
    pub fn distance(&self, x: &Element, y: &Element) -> u64 {
        self.word_length(&self.multiply(&self.inverse(x), y))
    }

    /// Exact ball size when a closed form is known.
    pub fn ball_size(&self, r: u64) -> Option<u128> {
        match *self {
            GroupSpec::FreeAbelian(n) => {
                // |{x ∈ ℤⁿ : |x|₁ ≤ r}| = Σ_k 2^k C(n,k) C(r,k)
                let mut total: u128 = 0;
                for k in 0..=n.min(r as usize) {
                    total = total.checked_add(
                        (1u128 << k)
                            .checked_mul(binom(n as u128, k as u128)?)?
                            .checked_mul(binom(r as u128, k as u128)?)?,
                    )?;
                }
                Some(total)
            }
            GroupSpec::Free(k) => {
                let k = k as u128;
                if k == 1 {
                    return Some(2 * r as u128 + 1);
                }
                let p = (2 * k - 1).checked_pow(r as u32)?;
                Some(1 + k * (p - 1) / (k - 1))
            }
            GroupSpec::Lamplighter(_) => None,
        }
    }

    pub fn encode(&self, x: &Element) -> Value {
        match x {
            Element::Vector(v) => json!(v),
            Element::Word(w) => Value::String(
                w.iter()
                    .map(|&l| {
                        let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
                        if l > 0 {
                            c
                        } else {
                            c.to_ascii_uppercase()
                        }
                    })
                    .collect(),
            ),
            Element::Lamps { lamps, pos } => {
                let mut by_value: BTreeMap<u32, Vec<i64>> = BTreeMap::new();
                for (&i, &v) in lamps {
                    by_value.entry(v).or_default().push(i);
                }
                let lamps: serde_json::Map<String, Value> =
                    by_value.into_iter().map(|(v, ps)| (v.to_string(), json!(ps))).collect();
                json!({ "lamps": lamps, "pos": pos })
            }
        }
    }

    pub fn decode(&self, v: &Value) -> Result<Element> {
        let bad = || Error::Input(format!("cannot read {v} as an element of {self}"));
        let x = match self {
            GroupSpec::FreeAbelian(_) => Element::Vector(
                v.as_array().ok_or_else(bad)?.iter().map(|c| c.as_i64().ok_or_else(bad)).collect::<Result<_>>()?,
            ),
            GroupSpec::Free(_) => {
                let s = v.as_str().ok_or_else(bad)?;
                let mut w = Vec::new();
                for c in s.chars() {
                    if !c.is_ascii_alphabetic() {
                        return Err(bad());
                    }
                    let i = (c.to_ascii_lowercase() as u8 - b'a') as i32 + 1;
                    w.push(if c.is_ascii_lowercase() { i } else { -i });
                }
                Element::Word(w)
            }
            GroupSpec::Lamplighter(_) => {
                let pos = v.get("pos").and_then(Value::as_i64).ok_or_else(bad)?;
                let mut lamps = BTreeMap::new();
                for (val, ps) in v.get("lamps").and_then(Value::as_object).ok_or_else(bad)? {
                    let val: u32 = val.parse().map_err(|_| bad())?;
                    for p in ps.as_array().ok_or_else(bad)? {
                        if lamps.insert(p.as_i64().ok_or_else(bad)?, val).is_some() {
                            return Err(bad());
                        }
                    }
                }
                Element::Lamps { lamps, pos }
            }
        };
        self.check(&x)?;
        Ok(x)
    }
}

fn binom(n: u128, k: u128) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::FreeAbelian(n) => write!(f, "Z^{n}"),
            GroupSpec::Free(k) => write!(f, "F_{k}"),
            GroupSpec::Lamplighter(m) => write!(f, "lamplighter({m})"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Reads the names printed by `Display`: `Z^n`, `F_k`, `lamplighter(m)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Input(format!("unknown group {s:?}; expected Z^n, F_k or lamplighter(m)"));
        let g = if s == "Z" {
            GroupSpec::FreeAbelian(1)
        } else if let Some(n) = s.strip_prefix("Z^") {
            GroupSpec::FreeAbelian(n.parse().map_err(|_| bad())?)
        } else if let Some(k) = s.strip_prefix("F_") {
            GroupSpec::Free(k.parse().map_err(|_| bad())?)
        } else if let Some(m) = s.strip_prefix("lamplighter(").and_then(|r| r.strip_suffix(')')) {
            GroupSpec::Lamplighter(m.parse().map_err(|_| bad())?)
        } else {
            return Err(bad());
        };
        g.validate()?;
        Ok(g)
    }
}

/// The word-metric ball `B(1, R)` with core `B(1, R − margin)`.
#[derive(Clone, Debug)]
pub struct GroupWindow {
    group: GroupSpec,
    radius: u64,
    margin: u64,
    elements: Vec<Element>,
    index: HashMap<Element, PointId>,
    lengths: Vec<u64>,
    dist: Vec<u16>,
}

/// Enumerate `B(1, R)` by breadth-first search, refusing beyond `cap` elements.
pub fn cayley_ball(g: GroupSpec, radius: u64, margin: u64, cap: usize) -> Result<GroupWindow> {
    g.validate()?;
    if margin > radius {
        return input(format!("margin {margin} exceeds the radius {radius}"));
    }
    if radius > u16::MAX as u64 / 2 {
        return input("radius too large");
    }
    if let Some(size) = g.ball_size(radius) {
        if size > cap as u128 {
            return refused(format!("ball of radius {radius} in {g} has {size} elements, above the cap {cap}"));
        }
    }
    let gens = g.generators();
    let id = g.identity();
    let mut elements = vec![id.clone()];
    let mut lengths = vec![0];
    let mut index = HashMap::from([(id, 0)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if lengths[i] == radius {
            continue;
        }
        for s in &gens {
            let y = g.multiply(&elements[i], s);
            if !index.contains_key(&y) {
                if elements.len() == cap {
                    return refused(format!("ball of radius {radius} in {g} has more than {cap} elements"));
                }
                index.insert(y.clone(), elements.len());
                lengths.push(lengths[i] + 1);
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    let m = elements.len();
    let mut dist = vec![0u16; m * m];
    for i in 0..m {
        let inv = g.inverse(&elements[i]);
        for j in i + 1..m {
            let d = g.word_length(&g.multiply(&inv, &elements[j])) as u16;
            dist[i * m + j] = d;
            dist[j * m + i] = d;
        }
    }
    Ok(GroupWindow { group: g, radius, margin, elements, index, lengths, dist })
}

impl GroupWindow {
    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn element(&self, p: PointId) -> &Element {
        &self.elements[p]
    }

    pub fn id_of(&self, x: &Element) -> Option<PointId> {
        self.index.get(x).copied()
    }

    pub fn word_length_of(&self, p: PointId) -> u64 {
        self.lengths[p]
    }

    /// `x · y` when it lies in the window.
    pub fn product(&self, x: PointId, y: &Element) -> Option<PointId> {
        self.id_of(&self.group.multiply(&self.elements[x], y))
    }

    fn steps(&self, a: PointId, b: PointId) -> u16 {
        self.dist[a * self.elements.len() + b]
    }
}

fn floor_steps(r: Scale) -> u64 {
    r.value().floor().to_integer().max(0) as u64
}

impl Space for GroupWindow {
    fn len(&self) -> usize {
        self.elements.len()
    }

    fn dist(&self, a: PointId, b: PointId) -> Scale {
        Scale::int(self.steps(a, b) as u32)
    }

    fn margin(&self) -> Scale {
        Scale::int(self.margin as u32)
    }

    fn in_core(&self, p: PointId) -> bool {
        self.lengths[p] + self.margin <= self.radius
    }

    fn ball(&self, center: PointId, r: Scale) -> Vec<PointId> {
        let k = floor_steps(r);
        (0..self.len()).filter(|&p| self.steps(center, p) as u64 <= k).collect()
    }

    fn set_diameter(&self, set: &[PointId]) -> Scale {
        let mut best = 0;
        for (i, &a) in set.iter().enumerate() {
            for &b in &set[i + 1..] {
                best = best.max(self.steps(a, b));
            }
        }
        Scale::int(best as u32)
    }

    fn encode(&self, p: PointId) -> Value {
        self.group.encode(&self.elements[p])
    }

    fn decode(&self, v: &Value) -> Result<PointId> {
        let x = self.group.decode(v)?;
        self.id_of(&x).ok_or_else(|| Error::Input(format!("{v} is outside the ball of radius {}", self.radius)))
    }
}

/// Window elements reachable from the identity by multiplying with the
/// sub-generators and their inverses without leaving the window.
pub fn subgroup_trace(w: &GroupWindow, sub_generators: &[Element]) -> Result<PointSet> {
    let g = w.group;
    let mut steps = Vec::new();
    for s in sub_generators {
        g.check(s)?;
        steps.push(s.clone());
        steps.push(g.inverse(s));
    }
    let start = w.id_of(&g.identity()).expect("identity is in every ball");
    let mut seen = vec![false; w.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for s in &steps {
            if let Some(y) = w.product(x, s) {
                if !std::mem::replace(&mut seen[y], true) {
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(PointSet::new((0..w.len()).filter(|&p| seen[p]).collect()))
}

/// Pull a colouring back along left translation: `χ(x) = χ_H(x₀⁻¹x)` for
/// `x ∈ F`. `F` must be `r`-connected and `x₀⁻¹F` must lie in the domain
/// of `χ_H`. A certificate of `χ_H` carries over and is re-checked.
pub fn transfer_coloring(
    h: &GroupWindow,
    chi_h: &Coloring,
    w: &GroupWindow,
    f: &PointSet,
    x0: PointId,
    r: Scale,
) -> Result<Coloring> {
    if h.group != w.group {
        return input("colouring and target windows belong to different groups");
    }
    if chi_h.space_len() != h.len() {
        return input("colouring does not belong to the source window");
    }
    if !f.contains(x0) {
        return input("base point is not in F");
    }
    if components(w, f, r).len() > 1 {
        return input(format!("F is not {r}-connected"));
    }
    let g = w.group;
    let back = g.inverse(&w.elements[x0]);
    let mut chi = Coloring::new(w.len(), chi_h.n());
    for x in f.iter() {
        let y = g.multiply(&back, &w.elements[x]);
        let c = h
            .id_of(&y)
            .and_then(|p| chi_h.get(p))
            .ok_or_else(|| Error::Input(format!("x₀⁻¹x = {} escapes the colouring's domain", g.encode(&y))))?;
        chi.set(x, c)?;
    }
    if let Some(Certificate { r: rc, d }) = chi_h.certified() {
        chi.certify(w, rc, d).map_err(|e| Error::Input(format!("transferred certificate failed to re-check: {e}")))?;
    }
    Ok(chi)
}

/// One `(r, n, d)` comparison of the oracle on the subgroup trace and on the
/// whole core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AsdimComparison {
    pub r: Scale,
    pub n: u32,
    pub d: Scale,
    /// `None` when the oracle refused within its budget.
    pub subgroup: Option<bool>,
    pub full: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct GroupDemo {
    pub window: GroupWindow,
    pub trace: PointSet,
    pub verdict: Verdict,
    pub comparisons: Vec<AsdimComparison>,
}

impl GroupDemo {
    pub fn to_json(&self) -> Value {
        json!({
            "group": self.window.group.to_string(),
            "radius": self.window.radius,
            "elements": self.window.len(),
            "trace": self.trace.len(),
            "verdict": self.verdict.to_json(&self.window),
            "asdim": self.comparisons.iter().map(|c| json!({
                "r": c.r, "n": c.n, "d": c.d, "subgroup": c.subgroup, "full": c.full,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Smallness verdict for the subgroup generated by `sub` inside the ball of
/// radius `R`, together with oracle comparisons at the given `(r, n, d)`.
pub fn group_smallness_demo(
    g: GroupSpec,
    sub: &[Element],
    radius: u64,
    margin: u64,
    deltas: &[Scale],
    phi_max: Scale,
    triples: &[(Scale, u32, Scale)],
    oracle: &OracleConfig,
) -> Result<GroupDemo> {
    let window = cayley_ball(g, radius, margin, MAX_GROUP_WINDOW)?;
    let trace = subgroup_trace(&window, sub)?;
    let verdict = small_verdict(&window, &trace, deltas, phi_max)?;
    let core = window.core();
    let sub_core = trace.intersection(&core);
    let answer = |domain: &PointSet, r, n, d| match asdim_oracle_on(&window, domain, r, n, d, oracle) {
        Ok(a) => Ok(Some(matches!(a, OracleAnswer::Colorable(_)))),
        Err(Error::Refused(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let comparisons = triples
        .iter()
        .map(|&(r, n, d)| {
            Ok(AsdimComparison { r, n, d, subgroup: answer(&sub_core, r, n, d)?, full: answer(&core, r, n, d)? })
        })
        .collect::<Result<_>>()?;
    Ok(GroupDemo { window, trace, verdict, comparisons })
}
