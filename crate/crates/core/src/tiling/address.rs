use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{emit, SubstitutionRule, TilingSystemSpec};
use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::order::OrderWindow;
use crate::seed;

/// Digit path of one tiling-system element, truncated at level `L`.
///
/// `digits[0]` is `d_L` and the last entry is `d_1`; `d_k` (1-based) says
/// which subtile of the level-k central tile is the level-(k−1) central tile.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Address {
    pub system: String,
    pub top_shape: usize,
    pub digits: Vec<u32>,
}

impl Address {
    pub fn level(&self) -> usize {
        self.digits.len()
    }

    /// `d_k` for `1 ≤ k ≤ L`.
    pub fn digit(&self, k: usize) -> Option<u32> {
        let l = self.level();
        (k >= 1 && k <= l).then(|| self.digits[l - k])
    }
}

/// Run lengths of first/last subtile choices counted down from the top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StraightnessReport {
    pub all_first_suffix_len: usize,
    pub all_last_suffix_len: usize,
    pub straight_up_to_l: bool,
}

/// Central tiles along an address, indexed by level `0..=L`.
#[derive(Debug)]
pub(crate) struct CentralPath {
    pub shapes: Vec<usize>,
    /// Position of `e` in the shape coordinates of the level-k central tile.
    pub positions: Vec<GroupElement>,
    /// Rank of `e` within the level-k central tile.
    pub ranks: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl TilingSystemSpec {
    /// Top shape from [`TilingSystemSpec::shape_distribution`], then
    /// independent uniform digits.
    pub fn sample_address(&self, level: usize, seed: u64) -> Result<Address> {
        let mut rng = seed::rng(seed, &[]);
        self.sample_address_with(level, &mut rng)
    }

    pub fn sample_address_with<R: Rng + ?Sized>(&self, level: usize, rng: &mut R) -> Result<Address> {
        if level == 0 {
            return Err(Error::input("addresses need at least one level"));
        }
        let dist = self.shape_distribution(level)?;
        let mut shape = pick(&dist, rng);
        let top_shape = shape;
        let mut digits = Vec::with_capacity(level);
        for k in (1..=level).rev() {
            let rule = self.rule(k, shape)?;
            let d = rng.random_range(0..rule.children.len());
            digits.push(d as u32 + 1);
            shape = rule.children[d].shape;
        }
        Ok(Address {
            system: self.name.clone(),
            top_shape,
            digits,
        })
    }

    pub(crate) fn central_path(&self, addr: &Address) -> Result<CentralPath> {
        if addr.system != self.name {
            return Err(Error::input(format!(
                "address belongs to {:?}, not {:?}",
                addr.system, self.name
            )));
        }
        let top = addr.level();
        if top == 0 {
            return Err(Error::input("address has no levels"));
        }
        let count = self.shape_count(top)?;
        if addr.top_shape >= count {
            return Err(Error::input(format!(
                "top shape #{} out of range ({count} shapes)",
                addr.top_shape
            )));
        }
        let d = self.group.dim();
        let mut shapes = vec![0; top + 1];
        let mut offsets = vec![GroupElement::zero(d); top + 1];
        let mut skipped = vec![0usize; top + 1];
        shapes[top] = addr.top_shape;
        for k in (1..=top).rev() {
            let rule = self.rule(k, shapes[k])?;
            let digit = addr.digits[top - k] as usize;
            if digit == 0 || digit > rule.children.len() {
                return Err(Error::input(format!(
                    "digit d_{k} = {digit} out of range 1..={}",
                    rule.children.len()
                )));
            }
            for child in &rule.children[..digit - 1] {
                skipped[k] += self.shape_size(k - 1, child.shape)?;
            }
            let child = &rule.children[digit - 1];
            offsets[k] = child.offset;
            shapes[k - 1] = child.shape;
        }
        let mut positions = vec![GroupElement::zero(d); top + 1];
        let mut ranks = vec![0usize; top + 1];
        let mut sizes = vec![1usize; top + 1];
        for k in 1..=top {
            positions[k] = offsets[k].add(&positions[k - 1]);
            ranks[k] = skipped[k] + ranks[k - 1];
            sizes[k] = self.shape_size(k, shapes[k])?;
        }
        Ok(CentralPath {
            shapes,
            positions,
            ranks,
            sizes,
        })
    }

    /// Level-`k` central tile `T^e_k = S·c` as (shape label, translation `c`)
    /// in coordinates where the addressed cell is `e`.
    pub fn central_tile(&self, addr: &Address, k: usize) -> Result<(String, GroupElement)> {
        if k > addr.level() {
            return Err(Error::input(format!(
                "level {k} above the address depth {}",
                addr.level()
            )));
        }
        let path = self.central_path(addr)?;
        Ok((self.shape_label(k, path.shapes[k])?, path.positions[k].neg()))
    }

    /// Cells of the level-`k` central tile, `S·c`.
    pub fn central_tile_cells(&self, addr: &Address, k: usize) -> Result<Vec<GroupElement>> {
        let (_, c) = self.central_tile(addr, k)?;
        let path = self.central_path(addr)?;
        let shape = self.shape(k, path.shapes[k])?;
        Ok(shape.cells.iter().map(|g| g.add(&c)).collect())
    }

    /// Order induced on the top central tile, anchored at the addressed cell.
    pub fn expand(&self, addr: &Address) -> Result<OrderWindow> {
        self.expand_level(addr, addr.level())
    }

    /// Order induced on the level-`k` central tile; the restriction of
    /// [`TilingSystemSpec::expand`] to that tile.
    pub fn expand_level(&self, addr: &Address, k: usize) -> Result<OrderWindow> {
        if k > addr.level() {
            return Err(Error::input(format!(
                "level {k} above the address depth {}",
                addr.level()
            )));
        }
        let path = self.central_path(addr)?;
        let table = self.rule_table(k)?;
        let mut cells = Vec::with_capacity(path.sizes[k]);
        emit(&table, k, path.shapes[k], &path.positions[k].neg(), &mut cells);
        Ok(OrderWindow::from_parts(self.group, -(path.ranks[k] as i64), cells))
    }

    pub fn straight_check(&self, addr: &Address) -> Result<StraightnessReport> {
        let path = self.central_path(addr)?;
        let top = addr.level();
        let mut first = 0;
        let mut last = 0;
        let mut first_run = true;
        let mut last_run = true;
        for k in (1..=top).rev() {
            let l = self.rule(k, path.shapes[k])?.children.len() as u32;
            let d = addr.digits[top - k];
            first_run &= d == 1;
            last_run &= d == l;
            first += usize::from(first_run);
            last += usize::from(last_run);
        }
        Ok(StraightnessReport {
            all_first_suffix_len: first,
            all_last_suffix_len: last,
            straight_up_to_l: first < top && last < top,
        })
    }

    /// Draws a straight address at `level` from the derived stream
    /// `[index, attempt]`, resampling until one passes. Returns the address
    /// and the number of rejected draws.
    pub fn sample_straight_address(&self, level: usize, master: u64, index: u64) -> Result<(Address, usize)> {
        const MAX_ATTEMPTS: u64 = 1_000;
        for attempt in 0..MAX_ATTEMPTS {
            let mut rng = seed::rng(master, &[index, attempt]);
            let addr = self.sample_address_with(level, &mut rng)?;
            if self.straight_check(&addr)?.straight_up_to_l {
                if attempt > 0 {
                    log::debug!("order {index}: accepted address after {attempt} non-straight draws");
                }
                return Ok((addr, attempt as usize));
            }
        }
        Err(Error::input(format!(
            "no straight address at level {level} in {MAX_ATTEMPTS} draws"
        )))
    }

    /// Adds one level above the top: the new top shape and digit are drawn
    /// from their conditional law given the current top shape.
    pub fn extend_address<R: Rng + ?Sized>(&self, addr: &mut Address, rng: &mut R) -> Result<()> {
        let top = addr.level();
        let dist = self.shape_distribution(top + 1)?;
        let mut options: Vec<(usize, usize, f64)> = Vec::new();
        for (parent, &p) in dist.iter().enumerate() {
            let rule = self.rule(top + 1, parent)?;
            let l = rule.children.len() as f64;
            for (i, child) in rule.children.iter().enumerate() {
                if child.shape == addr.top_shape && p > 0.0 {
                    options.push((parent, i, p / l));
                }
            }
        }
        if options.is_empty() {
            return Err(Error::input(format!(
                "shape #{} at level {top} never occurs as a subtile",
                addr.top_shape
            )));
        }
        let weights: Vec<f64> = options.iter().map(|o| o.2).collect();
        let (parent, i, _) = options[pick(&weights, rng)];
        addr.top_shape = parent;
        addr.digits.insert(0, i as u32 + 1);
        Ok(())
    }

    /// Smallest central-tile window holding `before` cells below and `after`
    /// cells above `e`; extends the address upward when the top tile is too
    /// small.
    pub fn covering_window<R: Rng + ?Sized>(
        &self,
        addr: &mut Address,
        before: usize,
        after: usize,
        rng: &mut R,
    ) -> Result<OrderWindow> {
        const MAX_EXTENSIONS: usize = 64;
        for _ in 0..=MAX_EXTENSIONS {
            let path = self.central_path(addr)?;
            let fits =
                (0..=addr.level()).find(|&k| path.ranks[k] >= before && path.sizes[k] - 1 - path.ranks[k] >= after);
            if let Some(k) = fits {
                return self.expand_level(addr, k);
            }
            self.extend_address(addr, rng)?;
        }
        Err(Error::window(format!(
            "no central tile covers [-{before}, {after}] after {MAX_EXTENSIONS} extensions"
        )))
    }

    /// Address of the same element in [`TilingSystemSpec::speed_up`]`(levels)`.
    pub fn speed_up_address(&self, addr: &Address, levels: &[usize]) -> Result<Address> {
        let top = *levels.last().ok_or_else(|| Error::input("empty speed-up level list"))?;
        if top != addr.level() {
            return Err(Error::input(format!(
                "speed-up must end at the address depth {}",
                addr.level()
            )));
        }
        let path = self.central_path(addr)?;
        let table = self.rule_table(top)?;
        let sizes = subtree_sizes(&table);
        let mut digits = Vec::with_capacity(levels.len() - 1);
        for w in levels.windows(2).rev() {
            let (low, high) = (w[0], w[1]);
            // position of the level-`low` central tile among the level-`low`
            // descendants of the level-`high` one, in lexicographic order
            let preceding = path.ranks[high] - path.ranks[low];
            let mut walk = Walk {
                table: &table,
                sizes: &sizes,
                target: low,
                rank: preceding,
                seen: 0,
                count: 0,
            };
            walk.run(high, path.shapes[high]);
            digits.push(walk.count as u32 + 1);
        }
        Ok(Address {
            system: format!("{}-sped", self.name),
            top_shape: addr.top_shape,
            digits,
        })
    }
}

/// Counts level-`target` descendants lying entirely before cell `rank`.
struct Walk<'a> {
    table: &'a [Vec<SubstitutionRule>],
    sizes: &'a [Vec<usize>],
    target: usize,
    rank: usize,
    seen: usize,
    count: usize,
}

impl Walk<'_> {
    fn run(&mut self, k: usize, s: usize) -> bool {
        if k == self.target {
            let size = self.sizes[k][s];
            if self.seen + size > self.rank {
                return true;
            }
            self.seen += size;
            self.count += 1;
            return false;
        }
        for child in &self.table[k][s].children {
            if self.run(k - 1, child.shape) {
                return true;
            }
        }
        false
    }
}

fn subtree_sizes(table: &[Vec<SubstitutionRule>]) -> Vec<Vec<usize>> {
    let mut sizes: Vec<Vec<usize>> = vec![vec![1]];
    for k in 1..table.len() {
        let row = table[k]
            .iter()
            .map(|r| r.children.iter().map(|c| sizes[k - 1][c.shape]).sum())
            .collect();
        sizes.push(row);
    }
    sizes
}

fn pick<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    if weights.len() == 1 {
        return 0;
    }
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}
