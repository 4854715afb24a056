//! Ordered deterministic congruent tiling systems.
//!
//! A system is described level by level: `𝒮_k` is a finite list of shapes
//! (finite sets containing `e`), and every level-k shape splits by one fixed
//! ordered rule into translated level-(k−1) shapes. Level 0 is the singleton
//! `{e}`. An [`Address`] picks one element of the inverse limit truncated at
//! a finite level; expanding it yields the induced order on the central tile.

mod address;
mod builtin;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

pub use address::{Address, StraightnessReport};
pub use builtin::{hilbert_subdivision, BuiltinTiling};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shape {
    pub label: String,
    pub cells: Vec<GroupElement>,
}

/// One subtile `S′_i c_i` of a rule: a lower-level shape index and its center.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Child {
    pub shape: usize,
    pub offset: GroupElement,
}

/// Ordered decomposition `S = ⊔ S′_i c_i` of shape `parent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionRule {
    pub parent: usize,
    pub children: Vec<Child>,
}

/// One level of an explicit system; `rules` decompose this level's shapes
/// into shapes of the level below.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingLevel {
    pub shapes: Vec<Shape>,
    #[serde(default)]
    pub rules: Vec<SubstitutionRule>,
}

/// JSON document form of a (truncated) tiling system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TilingDocument {
    pub name: String,
    pub group: GroupSpec,
    pub levels: Vec<TilingLevel>,
}

#[derive(Clone, Debug)]
enum Source {
    Builtin(BuiltinTiling),
    Explicit(Vec<TilingLevel>),
}

#[derive(Clone, Debug)]
pub struct TilingSystemSpec {
    name: String,
    group: GroupSpec,
    source: Source,
}

impl TilingSystemSpec {
    pub fn builtin(kind: BuiltinTiling) -> Self {
        let group = match kind {
            BuiltinTiling::Hilbert => GroupSpec::IntGrid(2),
            _ => GroupSpec::IntLine,
        };
        TilingSystemSpec {
            name: kind.name().to_string(),
            group,
            source: Source::Builtin(kind),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Ok(Self::builtin(name.parse()?))
    }

    /// Explicit system with finitely many levels. Nothing is validated here;
    /// see [`TilingSystemSpec::validate`].
    pub fn from_document(doc: TilingDocument) -> Result<Self> {
        if doc.levels.is_empty() {
            return Err(Error::input("a tiling document needs at least level 0"));
        }
        for level in &doc.levels {
            for shape in &level.shapes {
                for c in &shape.cells {
                    doc.group.check(c)?;
                }
            }
            for rule in &level.rules {
                for child in &rule.children {
                    doc.group.check(&child.offset)?;
                }
            }
        }
        Ok(TilingSystemSpec {
            name: doc.name,
            group: doc.group,
            source: Source::Explicit(doc.levels),
        })
    }

    /// Levels `0..=max_level` as a JSON-ready document.
    pub fn to_document(&self, max_level: usize) -> Result<TilingDocument> {
        let mut levels = Vec::with_capacity(max_level + 1);
        for k in 0..=max_level {
            let shapes = (0..self.shape_count(k)?)
                .map(|s| self.shape(k, s))
                .collect::<Result<Vec<_>>>()?;
            let rules = if k == 0 { Vec::new() } else { self.rules(k)? };
            levels.push(TilingLevel { shapes, rules });
        }
        Ok(TilingDocument {
            name: self.name.clone(),
            group: self.group,
            levels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn builtin_kind(&self) -> Option<BuiltinTiling> {
        match self.source {
            Source::Builtin(b) => Some(b),
            Source::Explicit(_) => None,
        }
    }

    /// Highest available level, `None` for the infinite built-ins.
    pub fn max_level(&self) -> Option<usize> {
        match &self.source {
            Source::Builtin(_) => None,
            Source::Explicit(levels) => Some(levels.len() - 1),
        }
    }

    fn check_level(&self, k: usize) -> Result<()> {
        match self.max_level() {
            Some(max) if k > max => Err(Error::input(format!(
                "level {k} exceeds the deepest level {max} of {}",
                self.name
            ))),
            _ => Ok(()),
        }
    }

    pub fn shape_count(&self, k: usize) -> Result<usize> {
        self.check_level(k)?;
        Ok(match &self.source {
            Source::Builtin(b) => builtin::shape_count(*b, k),
            Source::Explicit(levels) => levels[k].shapes.len(),
        })
    }

    fn check_shape(&self, k: usize, s: usize) -> Result<()> {
        let n = self.shape_count(k)?;
        if s >= n {
            return Err(Error::input(format!("level {k} has {n} shapes, no shape #{s}")));
        }
        Ok(())
    }

    pub fn shape_label(&self, k: usize, s: usize) -> Result<String> {
        self.check_shape(k, s)?;
        Ok(match &self.source {
            Source::Builtin(b) => builtin::shape_label(*b, k, s),
            Source::Explicit(levels) => levels[k].shapes[s].label.clone(),
        })
    }

    pub fn shape_index(&self, k: usize, label: &str) -> Result<usize> {
        (0..self.shape_count(k)?)
            .find(|&s| self.shape_label(k, s).map(|l| l == label).unwrap_or(false))
            .ok_or_else(|| Error::input(format!("no shape labeled {label:?} at level {k}")))
    }

    pub fn shape_size(&self, k: usize, s: usize) -> Result<usize> {
        self.check_shape(k, s)?;
        Ok(match &self.source {
            Source::Builtin(b) => builtin::shape_size(*b, k),
            Source::Explicit(levels) => levels[k].shapes[s].cells.len(),
        })
    }

    /// Declared cells of a shape (not derived from the rules).
    pub fn shape(&self, k: usize, s: usize) -> Result<Shape> {
        self.check_shape(k, s)?;
        Ok(match &self.source {
            Source::Builtin(b) => Shape {
                label: builtin::shape_label(*b, k, s),
                cells: builtin::shape_cells(*b, k),
            },
            Source::Explicit(levels) => levels[k].shapes[s].clone(),
        })
    }

    /// The rule splitting level-`k` shape `s` (k ≥ 1).
    pub fn rule(&self, k: usize, s: usize) -> Result<SubstitutionRule> {
        if k == 0 {
            return Err(Error::input("level-0 shapes have no subtiles"));
        }
        self.check_shape(k, s)?;
        match &self.source {
            Source::Builtin(b) => Ok(builtin::rule(*b, k, s)),
            Source::Explicit(levels) => levels[k]
                .rules
                .iter()
                .find(|r| r.parent == s)
                .cloned()
                .ok_or_else(|| Error::input(format!("no rule for shape #{s} at level {k}"))),
        }
    }

    pub fn rules(&self, k: usize) -> Result<Vec<SubstitutionRule>> {
        (0..self.shape_count(k)?).map(|s| self.rule(k, s)).collect()
    }

    /// Rules for levels `1..=top`, indexed `[k][parent]`, with child indices
    /// checked against the level below.
    pub(crate) fn rule_table(&self, top: usize) -> Result<Vec<Vec<SubstitutionRule>>> {
        let mut table = vec![Vec::new()];
        for k in 1..=top {
            let rules = self.rules(k)?;
            let below = self.shape_count(k - 1)?;
            for r in &rules {
                if r.children.is_empty() || r.children.iter().any(|c| c.shape >= below) {
                    return Err(Error::input(format!(
                        "rule for shape #{} at level {k} has invalid children",
                        r.parent
                    )));
                }
            }
            table.push(rules);
        }
        Ok(table)
    }

    /// Cells of level-`k` shape `s` in subtile order, in shape coordinates.
    pub fn ordered_cells(&self, k: usize, s: usize) -> Result<Vec<GroupElement>> {
        self.check_shape(k, s)?;
        let table = self.rule_table(k)?;
        let mut out = Vec::with_capacity(self.shape_size(k, s)?);
        emit(&table, k, s, &self.group.identity(), &mut out);
        Ok(out)
    }

    /// Distribution of level-`k` shapes used at the top of sampled addresses:
    /// the stationary vector of the column-normalized count matrix of the
    /// rules from level k+1 into level k.
    pub fn shape_distribution(&self, k: usize) -> Result<Vec<f64>> {
        let n = self.shape_count(k)?;
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let parents = match self.shape_count(k + 1) {
            Ok(p) => p,
            // no level above: nothing to be stationary for
            Err(_) => return Ok(vec![1.0 / n as f64; n]),
        };
        let rules = self.rules(k + 1)?;
        // a[c][p] = (# of child c in parent p) / l(p)
        let mut a = vec![vec![0.0; parents]; n];
        for r in &rules {
            let l = r.children.len() as f64;
            for c in &r.children {
                if c.shape >= n {
                    return Err(Error::input(format!("rule child #{} out of range", c.shape)));
                }
                a[c.shape][r.parent] += 1.0 / l;
            }
        }
        if parents != n {
            let uniform = 1.0 / parents as f64;
            return Ok(a.iter().map(|row| row.iter().sum::<f64>() * uniform).collect());
        }
        Ok(stationary(&a))
    }

    pub fn validate(&self, top: usize) -> ValidationReport {
        validate(self, top)
    }

    /// Speeds the system up along `levels` (starting at 0, strictly
    /// increasing): new level i is old level `levels[i]`, and each new rule
    /// lists the old level-`levels[i−1]` descendants in lexicographic order.
    pub fn speed_up(&self, levels: &[usize]) -> Result<TilingSystemSpec> {
        if levels.first() != Some(&0) || levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("speed-up levels must start at 0 and increase"));
        }
        let top = *levels.last().unwrap();
        let table = self.rule_table(top)?;
        let mut out = Vec::with_capacity(levels.len());
        for (i, &k) in levels.iter().enumerate() {
            let shapes = (0..self.shape_count(k)?)
                .map(|s| self.shape(k, s))
                .collect::<Result<Vec<_>>>()?;
            let rules = if i == 0 {
                Vec::new()
            } else {
                (0..shapes.len())
                    .map(|s| {
                        let mut children = Vec::new();
                        descendants(&table, k, s, levels[i - 1], &self.group.identity(), &mut children);
                        SubstitutionRule { parent: s, children }
                    })
                    .collect()
            };
            out.push(TilingLevel { shapes, rules });
        }
        Ok(TilingSystemSpec {
            name: format!("{}-sped", self.name),
            group: self.group,
            source: Source::Explicit(out),
        })
    }
}

fn emit(table: &[Vec<SubstitutionRule>], k: usize, s: usize, base: &GroupElement, out: &mut Vec<GroupElement>) {
    if k == 0 {
        out.push(*base);
        return;
    }
    for child in &table[k][s].children {
        emit(table, k - 1, child.shape, &base.add(&child.offset), out);
    }
}

fn descendants(
    table: &[Vec<SubstitutionRule>],
    k: usize,
    s: usize,
    target: usize,
    base: &GroupElement,
    out: &mut Vec<Child>,
) {
    if k == target {
        out.push(Child {
            shape: s,
            offset: *base,
        });
        return;
    }
    for child in &table[k][s].children {
        descendants(table, k - 1, child.shape, target, &base.add(&child.offset), out);
    }
}

/// Perron vector of a column-stochastic matrix by iterating its lazy version.
fn stationary(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..10_000 {
        let mut next = vec![0.0; n];
        for (c, row) in a.iter().enumerate() {
            next[c] = 0.5 * v[c] + 0.5 * row.iter().zip(&v).map(|(x, y)| x * y).sum::<f64>();
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= total);
        let delta: f64 = next.iter().zip(&v).map(|(x, y)| (x - y).abs()).sum();
        v = next;
        if delta < 1e-15 {
            break;
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Level 0 is not the singleton `{e}`.
    NotSingleton,
    MissingIdentity,
    /// No rule decomposes the shape.
    MissingRule,
    /// More than one rule claims the same parent.
    NonDeterministic,
    /// A child refers to a shape that does not exist one level down.
    BadChild,
    /// Two subtiles share a cell.
    Overlap,
    /// A parent cell is covered by no subtile.
    Uncovered,
    /// A subtile cell lies outside the parent.
    Extraneous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub level: usize,
    pub shape: String,
    pub kind: ViolationKind,
    pub witness: Option<GroupElement>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub levels_checked: usize,
    pub rules_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl Violation {
    fn new(level: usize, shape: &str, kind: ViolationKind, witness: Option<GroupElement>) -> Self {
        Violation {
            level,
            shape: shape.to_string(),
            kind,
            witness,
        }
    }
}

fn validate(spec: &TilingSystemSpec, top: usize) -> ValidationReport {
    let mut report = ValidationReport::default();
    let top = match spec.max_level() {
        Some(max) if max < top => {
            report
                .violations
                .push(Violation::new(max, "", ViolationKind::MissingRule, None));
            max
        }
        _ => top,
    };

    let identity = spec.group().identity();
    for k in 0..=top {
        let count = spec.shape_count(k).expect("level checked");
        let below = if k > 0 {
            spec.shape_count(k - 1).expect("level checked")
        } else {
            0
        };
        for s in 0..count {
            let shape = spec.shape(k, s).expect("shape index in range");
            let label = shape.label.as_str();
            if !shape.cells.contains(&identity) {
                report
                    .violations
                    .push(Violation::new(k, label, ViolationKind::MissingIdentity, None));
            }
            if k == 0 {
                if shape.cells != [identity] || count != 1 {
                    report
                        .violations
                        .push(Violation::new(0, label, ViolationKind::NotSingleton, None));
                }
                continue;
            }
            let rules: Vec<SubstitutionRule> = match &spec.source {
                Source::Builtin(b) => vec![builtin::rule(*b, k, s)],
                Source::Explicit(levels) => levels[k].rules.iter().filter(|r| r.parent == s).cloned().collect(),
            };
            if rules.is_empty() {
                report
                    .violations
                    .push(Violation::new(k, label, ViolationKind::MissingRule, None));
                continue;
            }
            if rules.len() > 1 {
                report
                    .violations
                    .push(Violation::new(k, label, ViolationKind::NonDeterministic, None));
            }
            for rule in &rules {
                report.rules_checked += 1;
                check_partition(spec, k, below, &shape, rule, &mut report.violations);
            }
        }
        report.levels_checked = k + 1;
    }
    report
}

fn check_partition(
    spec: &TilingSystemSpec,
    k: usize,
    below: usize,
    parent: &Shape,
    rule: &SubstitutionRule,
    violations: &mut Vec<Violation>,
) {
    let label = parent.label.as_str();
    let mut covered: HashMap<GroupElement, usize> = HashMap::with_capacity(parent.cells.len());
    for child in &rule.children {
        if child.shape >= below {
            violations.push(Violation::new(k, label, ViolationKind::BadChild, None));
            continue;
        }
        let sub = spec.shape(k - 1, child.shape).expect("child index checked");
        for c in &sub.cells {
            *covered.entry(c.add(&child.offset)).or_default() += 1;
        }
    }
    let mut overlaps: Vec<&GroupElement> = covered.iter().filter(|(_, &n)| n > 1).map(|(c, _)| c).collect();
    overlaps.sort();
    for c in overlaps {
        violations.push(Violation::new(k, label, ViolationKind::Overlap, Some(*c)));
    }
    for c in &parent.cells {
        if !covered.contains_key(c) {
            violations.push(Violation::new(k, label, ViolationKind::Uncovered, Some(*c)));
        }
    }
    let declared: HashSet<&GroupElement> = parent.cells.iter().collect();
    let mut extra: Vec<&GroupElement> = covered.keys().filter(|c| !declared.contains(c)).collect();
    extra.sort();
    for c in extra {
        violations.push(Violation::new(k, label, ViolationKind::Extraneous, Some(*c)));
    }
}

#[cfg(test)]
mod tests;
