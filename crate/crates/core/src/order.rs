//! Finite windows of orders of type ℤ on a lattice group.
//!
//! An order of type ℤ is encoded by its anchored bijection `bi: ℤ → G`
//! (`bi(0) = e`). Only a finite segment `bi|[lo, hi]` is ever held in memory;
//! everything that would need cells outside the segment fails with
//! [`Error::OutOfWindow`].

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rustc_hash::{FxHashMap, FxHashSet};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

/// Segment `[lo, hi]` of an anchored bijection `bi: ℤ → G`.
#[derive(Debug)]
pub struct OrderWindow {
    group: GroupSpec,
    lo: i64,
    cells: Vec<GroupElement>,
    index: OnceLock<FxHashMap<GroupElement, i64>>,
}

impl Clone for OrderWindow {
    fn clone(&self) -> Self {
        OrderWindow {
            group: self.group,
            lo: self.lo,
            cells: self.cells.clone(),
            index: OnceLock::new(),
        }
    }
}

impl PartialEq for OrderWindow {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.lo == other.lo && self.cells == other.cells
    }
}

impl Eq for OrderWindow {}

/// Which side of an anchor an interval extends to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Forward,
    Backward,
}

impl OrderWindow {
    /// Builds a window from `cells[i - lo]`, checking anchoring, injectivity
    /// and dimensions.
    pub fn new(group: GroupSpec, lo: i64, cells: Vec<GroupElement>) -> Result<Self> {
        if lo > 0 {
            return Err(Error::input(format!("window must contain index 0, lo = {lo}")));
        }
        let len = cells.len() as i64;
        if lo + len - 1 < 0 {
            return Err(Error::input(format!(
                "window must contain index 0, got [{lo}, {}]",
                lo + len - 1
            )));
        }
        for c in &cells {
            group.check(c)?;
        }
        if !cells[(-lo) as usize].is_zero() {
            return Err(Error::input(format!(
                "window is not anchored: cells(0) = {}",
                cells[(-lo) as usize]
            )));
        }
        if let Some(k) = first_repeat(&cells) {
            return Err(Error::input(format!(
                "window is not injective: {} repeats at index {}",
                cells[k],
                lo + k as i64
            )));
        }
        Ok(Self::from_parts(group, lo, cells))
    }

    /// Trusted constructor for producers that guarantee the invariants.
    pub(crate) fn from_parts(group: GroupSpec, lo: i64, cells: Vec<GroupElement>) -> Self {
        debug_assert!(lo <= 0 && lo + cells.len() as i64 > 0);
        debug_assert!(cells[(-lo) as usize].is_zero());
        OrderWindow {
            group,
            lo,
            cells,
            index: OnceLock::new(),
        }
    }

    /// The natural order of ℤ restricted to `[lo, hi]`.
    pub fn standard_line(lo: i64, hi: i64) -> Result<Self> {
        if lo > 0 || hi < 0 {
            return Err(Error::input(format!("[{lo}, {hi}] does not contain 0")));
        }
        let cells = (lo..=hi).map(GroupElement::int).collect();
        Ok(Self::from_parts(GroupSpec::IntLine, lo, cells))
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.cells.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains_index(&self, i: i64) -> bool {
        i >= self.lo && i <= self.hi()
    }

    /// `bi(i)`.
    pub fn cell(&self, i: i64) -> Result<&GroupElement> {
        if !self.contains_index(i) {
            return Err(Error::window(format!("index {i} outside [{}, {}]", self.lo, self.hi())));
        }
        Ok(&self.cells[(i - self.lo) as usize])
    }

    /// Cells in order, starting at `lo`.
    pub fn cells(&self) -> &[GroupElement] {
        &self.cells
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &GroupElement)> + '_ {
        self.cells.iter().enumerate().map(move |(k, c)| (self.lo + k as i64, c))
    }

    fn index_map(&self) -> &FxHashMap<GroupElement, i64> {
        self.index.get_or_init(|| {
            self.cells
                .iter()
                .enumerate()
                .map(|(k, c)| (*c, self.lo + k as i64))
                .collect()
        })
    }

    /// `i` with `bi(i) = g`.
    pub fn index_of(&self, g: &GroupElement) -> Result<i64> {
        self.index_map()
            .get(g)
            .copied()
            .ok_or_else(|| Error::window(format!("{g} is not in the window")))
    }

    pub fn succ(&self, g: &GroupElement) -> Result<GroupElement> {
        let i = self.index_of(g)?;
        if i == self.hi() {
            return Err(Error::window(format!("{g} is the last cell of the window")));
        }
        Ok(self.cells[(i + 1 - self.lo) as usize])
    }

    pub fn to_increments(&self) -> IncrementWindow {
        let incr = self.cells.windows(2).map(|pair| pair[1].sub(&pair[0])).collect();
        IncrementWindow {
            group: self.group,
            lo: self.lo,
            hi: self.hi(),
            incr,
        }
    }

    pub fn from_increments(iw: &IncrementWindow) -> Result<Self> {
        iw.validate()?;
        let g = iw.group;
        let n = (iw.hi - iw.lo + 1) as usize;
        let zero = (-iw.lo) as usize;
        // cells(i+1) = incr(i)·cells(i), both directions from the anchor
        let mut cells = Vec::with_capacity(n);
        let mut cur = g.identity();
        for k in (0..zero).rev() {
            cur = cur.sub(&iw.incr[k]);
            cells.push(cur);
        }
        cells.reverse();
        cur = g.identity();
        cells.push(cur);
        for k in zero..n - 1 {
            cur = iw.incr[k].add(&cur);
            cells.push(cur);
        }
        if let Some(k) = first_repeat(&cells) {
            return Err(Error::InvalidIncrements {
                cell: cells[k],
                index: iw.lo + k as i64,
            });
        }
        Ok(Self::from_parts(g, iw.lo, cells))
    }

    /// `g(≺)`: the order `a ≺′ b ⟺ ag ≺ bg`, re-anchored at `e`.
    ///
    /// With `g = bi(k)` the result has range `[lo − k, hi − k]` and
    /// `bi′(i) = bi(i + k)·g⁻¹`.
    pub fn act(&self, g: &GroupElement) -> Result<OrderWindow> {
        // one lookup does not pay for building the index
        let k = match self.index.get() {
            Some(_) => self.index_of(g)?,
            None => self
                .cells
                .iter()
                .position(|c| c == g)
                .map(|p| self.lo + p as i64)
                .ok_or_else(|| Error::window(format!("{g} is not in the window")))?,
        };
        let cells = self.cells.iter().map(|c| c.sub(g)).collect();
        Ok(Self::from_parts(self.group, self.lo - k, cells))
    }

    /// Order interval `[bi(i), …, bi(j)]`.
    pub fn interval(&self, i: i64, j: i64) -> Result<&[GroupElement]> {
        if i > j {
            return Err(Error::input(format!("empty interval [{i}, {j}]")));
        }
        if !self.contains_index(i) || !self.contains_index(j) {
            return Err(Error::window(format!(
                "interval [{i}, {j}] outside [{}, {}]",
                self.lo,
                self.hi()
            )));
        }
        Ok(&self.cells[(i - self.lo) as usize..=(j - self.lo) as usize])
    }

    /// `[F, F+n]≺ = ⋃_{g∈F} [g, g+n]≺`, or `[F−n, F]≺` for [`Side::Backward`].
    pub fn interval_from_set(&self, set: &[GroupElement], n: u64, side: Side) -> Result<HashSet<GroupElement>> {
        let n = n as i64;
        let mut out = HashSet::with_capacity(set.len() + n as usize);
        for g in set {
            let i = self.index_of(g)?;
            let (a, b) = match side {
                Side::Forward => (i, i + n),
                Side::Backward => (i - n, i),
            };
            out.extend(self.interval(a, b)?.iter().cloned());
        }
        Ok(out)
    }

    pub fn compare(&self, a: &GroupElement, b: &GroupElement) -> Result<Ordering> {
        Ok(self.index_of(a)?.cmp(&self.index_of(b)?))
    }

    /// Ranking of all cells of the window, rank 0 at `bi(lo)`.
    pub fn to_ranking(&self) -> OrderRanking {
        OrderRanking::from_sequence(self.cells.clone())
    }
}

impl Serialize for OrderWindow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        WindowRepr {
            group: Some(self.group),
            lo: self.lo,
            hi: self.hi(),
            cells: self.iter().map(|(i, c)| (i, *c)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OrderWindow {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = WindowRepr::deserialize(deserializer)?;
        let mut entries = repr.cells;
        entries.sort_by_key(|(i, _)| *i);
        let expected: Vec<i64> = (repr.lo..=repr.hi).collect();
        let found: Vec<i64> = entries.iter().map(|(i, _)| *i).collect();
        if expected != found {
            return Err(D::Error::custom("cells must list every index of [lo, hi] once"));
        }
        let group = match repr.group {
            Some(g) => g,
            None => match entries.first() {
                Some((_, c)) if c.dim() == 1 => GroupSpec::IntLine,
                Some((_, c)) => GroupSpec::IntGrid(c.dim()),
                None => return Err(D::Error::custom("empty window")),
            },
        };
        let cells = entries.into_iter().map(|(_, c)| c).collect();
        OrderWindow::new(group, repr.lo, cells).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowRepr {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<GroupSpec>,
    lo: i64,
    hi: i64,
    cells: Vec<(i64, GroupElement)>,
}

/// Position of the first cell equal to an earlier one. Compact cell sets
/// are checked with a bitmap over their bounding box.
fn first_repeat(cells: &[GroupElement]) -> Option<usize> {
    let d = cells.first().map_or(0, |c| c.dim());
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for c in cells {
        for (i, &x) in c.coords().iter().enumerate() {
            lo[i] = lo[i].min(x);
            hi[i] = hi[i].max(x);
        }
    }
    let volume = lo
        .iter()
        .zip(&hi)
        .try_fold(1u64, |acc, (a, b)| acc.checked_mul((b - a + 1) as u64));
    match volume {
        Some(v) if v <= 8 * cells.len() as u64 + 64 => {
            let mut seen = vec![false; v as usize];
            cells.iter().position(|c| {
                let slot = c
                    .coords()
                    .iter()
                    .zip(lo.iter().zip(&hi))
                    .fold(0u64, |acc, (&x, (&a, &b))| acc * (b - a + 1) as u64 + (x - a) as u64)
                    as usize;
                std::mem::replace(&mut seen[slot], true)
            })
        }
        _ => {
            let mut seen = FxHashSet::with_capacity_and_hasher(cells.len(), Default::default());
            cells.iter().position(|c| !seen.insert(c))
        }
    }
}

/// Increment form: `incr(i) = bi(i+1)·bi(i)⁻¹` for `i ∈ [lo, hi−1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncrementWindow {
    pub group: GroupSpec,
    pub lo: i64,
    pub hi: i64,
    pub incr: Vec<GroupElement>,
}

impl IncrementWindow {
    pub fn get(&self, i: i64) -> Result<&GroupElement> {
        if i < self.lo || i >= self.hi {
            return Err(Error::window(format!(
                "increment index {i} outside [{}, {}]",
                self.lo,
                self.hi - 1
            )));
        }
        Ok(&self.incr[(i - self.lo) as usize])
    }

    fn validate(&self) -> Result<()> {
        if self.lo > 0 || self.hi < 0 {
            return Err(Error::input(format!(
                "increment window [{}, {}] does not contain 0",
                self.lo, self.hi
            )));
        }
        if self.incr.len() as i64 != self.hi - self.lo {
            return Err(Error::input(format!(
                "expected {} increments, got {}",
                self.hi - self.lo,
                self.incr.len()
            )));
        }
        for g in &self.incr {
            self.group.check(g)?;
        }
        Ok(())
    }
}

/// A total order on a finite cell set, as a sequence from least to greatest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderRanking {
    pub order: Vec<GroupElement>,
}

impl OrderRanking {
    pub fn from_sequence(order: Vec<GroupElement>) -> Self {
        OrderRanking { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn rank(&self, g: &GroupElement) -> Option<usize> {
        self.order.iter().position(|c| c == g)
    }

    pub fn ranks(&self) -> HashMap<GroupElement, usize> {
        self.order.iter().enumerate().map(|(r, c)| (*c, r)).collect()
    }

    /// Window anchored at `anchor`: `bi(i) = order[rank(anchor) + i]·anchor⁻¹`.
    pub fn to_window(&self, group: GroupSpec, anchor: &GroupElement) -> Result<OrderWindow> {
        let r = self
            .rank(anchor)
            .ok_or_else(|| Error::window(format!("anchor {anchor} is not ranked")))?;
        let inv = group.inverse(anchor)?;
        let cells = self
            .order
            .iter()
            .map(|c| group.compose(c, &inv))
            .collect::<Result<Vec<_>>>()?;
        OrderWindow::new(group, -(r as i64), cells)
    }
}

/// Finite-set restriction of the i.i.d. invariant random order
/// `a ≺ b ⟺ ω_a < ω_b`.
///
/// Draws are taken in canonical cell order so the ranking depends only on
/// the set and the seed. Ties between the 64-bit draws fall back to the
/// canonical encoding. The ranking has order type of a finite set and is
/// not fed to the entropy estimators.
pub fn iid_order(cells: &[GroupElement], seed: u64) -> Result<OrderRanking> {
    if cells.is_empty() {
        return Err(Error::input("iid_order needs a nonempty cell set"));
    }
    let mut canonical: Vec<GroupElement> = cells.to_vec();
    canonical.sort();
    canonical.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keyed: Vec<(u64, GroupElement)> = canonical.into_iter().map(|c| (rng.random::<u64>(), c)).collect();
    keyed.sort();
    Ok(OrderRanking::from_sequence(keyed.into_iter().map(|(_, c)| c).collect()))
}
