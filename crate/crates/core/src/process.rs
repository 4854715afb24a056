//! Stationary symbolic processes with exact samplers and cylinder laws.
//!
//! Symbols are `u32` values `0..alphabet_size`. A periodic overlay emits the
//! pair (base symbol, marker) packed as `base * markers + marker`.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::seed;

pub type Symbol = u32;

const SUM_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of atoms an exact cylinder law may enumerate.
pub const DEFAULT_ATOM_BUDGET: f64 = (1u64 << 22) as f64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProcessVariant {
    /// Independent symbols with law `probs`.
    Bernoulli { probs: Vec<f64> },
    /// Stationary chain along the integers. `initial`, when given, must be
    /// stationary for `transition`.
    MarkovLine {
        transition: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<f64>>,
    },
    /// Base process paired with the marker
    /// `mixed_radix((g + phase) mod period) mod markers`, phase uniform.
    PeriodicOverlay {
        base: Box<ProcessSpec>,
        period: Vec<u64>,
        markers: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawProcessSpec")]
pub struct ProcessSpec {
    pub group: GroupSpec,
    pub variant: ProcessVariant,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProcessSpec {
    group: GroupSpec,
    variant: ProcessVariant,
}

impl TryFrom<RawProcessSpec> for ProcessSpec {
    type Error = Error;

    fn try_from(raw: RawProcessSpec) -> Result<Self> {
        let spec = ProcessSpec {
            group: raw.group,
            variant: raw.variant,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(Error::input(format!("{what} is empty")));
    }
    if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::input(format!("{what} has a negative or non-finite entry")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::input(format!("{what} sums to {s}, not 1")));
    }
    Ok(())
}

fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

impl ProcessSpec {
    pub fn bernoulli(group: GroupSpec, probs: Vec<f64>) -> Result<Self> {
        let spec = ProcessSpec {
            group,
            variant: ProcessVariant::Bernoulli { probs },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fair_coin(group: GroupSpec) -> Self {
        Self::bernoulli(group, vec![0.5, 0.5]).expect("valid law")
    }

    pub fn markov_line(transition: Vec<Vec<f64>>) -> Result<Self> {
        let spec = ProcessSpec {
            group: GroupSpec::IntLine,
            variant: ProcessVariant::MarkovLine {
                transition,
                initial: None,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Two-state chain that switches symbol with probability `flip`.
    pub fn symmetric_flip(flip: f64) -> Result<Self> {
        Self::markov_line(vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]])
    }

    pub fn periodic_overlay(base: ProcessSpec, period: Vec<u64>, markers: u32) -> Result<Self> {
        let spec = ProcessSpec {
            group: base.group,
            variant: ProcessVariant::PeriodicOverlay {
                base: Box::new(base),
                period,
                markers,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.variant {
            ProcessVariant::Bernoulli { probs } => check_distribution(probs, "probability vector"),
            ProcessVariant::MarkovLine { transition, initial } => {
                if !self.group.is_line() {
                    return Err(Error::input("a Markov chain process needs the group Z"));
                }
                let k = transition.len();
                for (i, row) in transition.iter().enumerate() {
                    if row.len() != k {
                        return Err(Error::input("transition matrix is not square"));
                    }
                    check_distribution(row, &format!("transition row {i}"))?;
                }
                if k == 0 {
                    return Err(Error::input("transition matrix is empty"));
                }
                if let Some(pi) = initial {
                    check_distribution(pi, "initial law")?;
                    if pi.len() != k {
                        return Err(Error::input("initial law has the wrong length"));
                    }
                    let m = Matrix::from_rows(transition);
                    let next = m.left_mul(pi);
                    let err = next.iter().zip(pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    if err > 1e-9 {
                        return Err(Error::input(format!("initial law is not stationary (error {err:e})")));
                    }
                } else {
                    stationary(&Matrix::from_rows(transition))?;
                }
                Ok(())
            }
            ProcessVariant::PeriodicOverlay { base, period, markers } => {
                base.validate()?;
                if base.group != self.group {
                    return Err(Error::input("overlay base lives on a different group"));
                }
                if matches!(base.variant, ProcessVariant::PeriodicOverlay { .. }) {
                    return Err(Error::input("nested overlays are not supported"));
                }
                if period.len() != self.group.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.group.dim(),
                        found: period.len(),
                    });
                }
                if period.contains(&0) || *markers == 0 {
                    return Err(Error::input("periods and marker count must be positive"));
                }
                let phases = period.iter().try_fold(1u64, |acc, &p| acc.checked_mul(p));
                match phases {
                    Some(n) if n <= 1 << 24 => {}
                    _ => return Err(Error::input("period lattice too large")),
                }
                let total = base.alphabet_size() as u64 * *markers as u64;
                if total > u32::MAX as u64 {
                    return Err(Error::input("overlay alphabet too large"));
                }
                Ok(())
            }
        }
    }

    pub fn alphabet_size(&self) -> u32 {
        match &self.variant {
            ProcessVariant::Bernoulli { probs } => probs.len() as u32,
            ProcessVariant::MarkovLine { transition, .. } => transition.len() as u32,
            ProcessVariant::PeriodicOverlay { base, markers, .. } => base.alphabet_size() * markers,
        }
    }

    /// Law of the symbol at any single cell.
    pub fn marginal(&self) -> Result<Vec<f64>> {
        match &self.variant {
            ProcessVariant::Bernoulli { probs } => Ok(probs.clone()),
            ProcessVariant::MarkovLine { transition, initial } => match initial {
                Some(pi) => Ok(pi.clone()),
                None => stationary(&Matrix::from_rows(transition)),
            },
            ProcessVariant::PeriodicOverlay { base, period, markers } => {
                let b = base.marginal()?;
                let m = marker_marginal(period, *markers);
                let mut out = Vec::with_capacity(b.len() * m.len());
                for pb in &b {
                    for pm in &m {
                        out.push(pb * pm);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Upper bound on the number of distinct tuples on `n` cells.
    pub fn support_bound(&self, n: usize) -> f64 {
        match &self.variant {
            ProcessVariant::Bernoulli { probs } => (probs.iter().filter(|&&p| p > 0.0).count() as f64).powi(n as i32),
            ProcessVariant::MarkovLine { .. } => {
                let k = self
                    .marginal()
                    .map(|pi| pi.iter().filter(|&&p| p > 0.0).count())
                    .unwrap_or(self.alphabet_size() as usize);
                (k as f64).powi(n as i32)
            }
            ProcessVariant::PeriodicOverlay { base, period, markers } => {
                let phases = period.iter().product::<u64>() as f64;
                let marker_patterns = (*markers as f64).powi(n as i32);
                base.support_bound(n) * phases.min(marker_patterns)
            }
        }
    }

    /// Entropy of the symbol at `e` in bits.
    pub fn marginal_entropy(&self) -> Result<f64> {
        Ok(entropy_bits(&self.marginal()?))
    }
}

/// Law of the marker at `e` under a uniform phase.
pub fn marker_marginal(period: &[u64], markers: u32) -> Vec<f64> {
    let phases: u64 = period.iter().product();
    let mut counts = vec![0u64; markers as usize];
    for idx in 0..phases {
        counts[(idx % markers as u64) as usize] += 1;
    }
    counts.iter().map(|&c| c as f64 / phases as f64).collect()
}

/// Marker at `g` for phase vector `phase`.
fn marker_at(g: &GroupElement, phase: &[u64], period: &[u64], markers: u32) -> Symbol {
    let mut idx = 0u64;
    for ((&x, &ph), &p) in g.coords().iter().zip(phase).zip(period) {
        let r = (x + ph as i64).rem_euclid(p as i64) as u64;
        idx = idx * p + r;
    }
    (idx % markers as u64) as Symbol
}

fn phase_of(mut index: u64, period: &[u64]) -> Vec<u64> {
    let mut phase = vec![0u64; period.len()];
    for (slot, &p) in phase.iter_mut().zip(period).rev() {
        *slot = index % p;
        index /= p;
    }
    phase
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Matrix {
    n: usize,
    a: Vec<f64>,
}

impl Matrix {
    pub(crate) fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Matrix {
            n,
            a: rows.iter().flatten().copied().collect(),
        }
    }

    fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        Matrix { n, a }
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] += x * other.a[k * n + j];
                }
            }
        }
        Matrix { n, a }
    }

    fn left_mul(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for (i, &x) in v.iter().enumerate() {
            for j in 0..n {
                out[j] += x * self.a[i * n + j];
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut e: u64) -> Matrix {
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// Stationary law by power iteration on the lazy chain `(I + P)/2`.
fn stationary(p: &Matrix) -> Result<Vec<f64>> {
    let n = p.n;
    let mut lazy = p.clone();
    for v in lazy.a.iter_mut() {
        *v *= 0.5;
    }
    for i in 0..n {
        lazy.a[i * n + i] += 0.5;
    }
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..200_000 {
        let next = lazy.left_mul(&pi);
        let err = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        pi = next;
        if err < 1e-15 {
            let s: f64 = pi.iter().sum();
            return Ok(pi.into_iter().map(|x| x / s).collect());
        }
    }
    Err(Error::input(
        "stationary law did not converge; give an explicit initial law",
    ))
}

/// Symbols on a finite cell set, in the order the cells were requested.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub cells: Vec<GroupElement>,
    pub symbols: Vec<Symbol>,
}

impl Configuration {
    pub fn get(&self, g: &GroupElement) -> Option<Symbol> {
        self.cells.iter().position(|c| c == g).map(|i| self.symbols[i])
    }

    pub fn as_map(&self) -> HashMap<GroupElement, Symbol> {
        self.cells.iter().cloned().zip(self.symbols.iter().copied()).collect()
    }

    /// One row per cell: coordinates then the symbol.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let d = self.cells.first().map_or(1, |c| c.dim());
        let mut header: Vec<String> = match d {
            1 => vec!["x".into()],
            2 => vec!["x".into(), "y".into()],
            _ => (0..d).map(|i| format!("x{i}")).collect(),
        };
        header.push("symbol".into());
        wtr.write_record(&header)?;
        for (c, s) in self.cells.iter().zip(&self.symbols) {
            let mut row: Vec<String> = c.coords().iter().map(|x| x.to_string()).collect();
            row.push(s.to_string());
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

fn cdf(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out: Vec<f64> = p
        .iter()
        .map(|&x| {
            acc += x;
            acc
        })
        .collect();
    if let Some(last) = out.last_mut() {
        *last = f64::INFINITY;
    }
    out
}

fn draw<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> Symbol {
    let u: f64 = rng.random();
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) as Symbol
}

enum Plan {
    Iid(Vec<f64>),
    Chain {
        /// Cell positions sorted by coordinate.
        order: Vec<usize>,
        initial: Vec<f64>,
        /// `steps[t]` holds one CDF per current state for the gap to the
        /// `t+1`-th sorted cell.
        steps: Vec<Vec<Vec<f64>>>,
    },
    Overlay {
        base: Box<Plan>,
        period: Vec<u64>,
        markers: u32,
        phases: u64,
    },
}

/// Reusable exact sampler for one process on one cell list.
pub struct Sampler {
    cells: Vec<GroupElement>,
    plan: Plan,
}

impl Sampler {
    pub fn new(spec: &ProcessSpec, cells: &[GroupElement]) -> Result<Self> {
        for c in cells {
            spec.group.check(c)?;
        }
        let mut seen = std::collections::HashSet::with_capacity(cells.len());
        if let Some(dup) = cells.iter().find(|c| !seen.insert(*c)) {
            return Err(Error::input(format!("cell {dup} requested twice")));
        }
        Ok(Sampler {
            cells: cells.to_vec(),
            plan: Self::plan(spec, cells)?,
        })
    }

    fn plan(spec: &ProcessSpec, cells: &[GroupElement]) -> Result<Plan> {
        Ok(match &spec.variant {
            ProcessVariant::Bernoulli { probs } => Plan::Iid(cdf(probs)),
            ProcessVariant::MarkovLine { transition, .. } => {
                let p = Matrix::from_rows(transition);
                let mut order: Vec<usize> = (0..cells.len()).collect();
                order.sort_by_key(|&i| cells[i].coords()[0]);
                let mut powers: HashMap<u64, Vec<Vec<f64>>> = HashMap::new();
                let mut steps = Vec::with_capacity(order.len().saturating_sub(1));
                for pair in order.windows(2) {
                    let gap = (cells[pair[1]].coords()[0] - cells[pair[0]].coords()[0]) as u64;
                    let table = powers.entry(gap).or_insert_with(|| {
                        let m = p.pow(gap);
                        (0..m.n).map(|i| cdf(m.row(i))).collect()
                    });
                    steps.push(table.clone());
                }
                Plan::Chain {
                    order,
                    initial: cdf(&spec.marginal()?),
                    steps,
                }
            }
            ProcessVariant::PeriodicOverlay { base, period, markers } => Plan::Overlay {
                base: Box::new(Self::plan(base, cells)?),
                period: period.clone(),
                markers: *markers,
                phases: period.iter().product(),
            },
        })
    }

    pub fn cells(&self) -> &[GroupElement] {
        &self.cells
    }

    /// Writes one joint draw into `out`, aligned with the requested cells.
    pub fn draw_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [Symbol]) {
        Self::run(&self.plan, &self.cells, rng, out);
    }

    fn run<R: Rng + ?Sized>(plan: &Plan, cells: &[GroupElement], rng: &mut R, out: &mut [Symbol]) {
        match plan {
            Plan::Iid(c) => {
                for s in out.iter_mut() {
                    *s = draw(c, rng);
                }
            }
            Plan::Chain { order, initial, steps } => {
                let Some(&first) = order.first() else { return };
                let mut state = draw(initial, rng);
                out[first] = state;
                for (t, &pos) in order[1..].iter().enumerate() {
                    state = draw(&steps[t][state as usize], rng);
                    out[pos] = state;
                }
            }
            Plan::Overlay {
                base,
                period,
                markers,
                phases,
            } => {
                let phase = phase_of(rng.random_range(0..*phases), period);
                Self::run(base, cells, rng, out);
                for (s, g) in out.iter_mut().zip(cells) {
                    *s = *s * markers + marker_at(g, &phase, period, *markers);
                }
            }
        }
    }
}

/// One exact draw of the process on `cells`; deterministic per seed.
pub fn sample(spec: &ProcessSpec, cells: &[GroupElement], seed: u64) -> Result<Configuration> {
    let sampler = Sampler::new(spec, cells)?;
    let mut rng = seed::rng(seed, &[]);
    let mut symbols = vec![0; cells.len()];
    sampler.draw_into(&mut rng, &mut symbols);
    Ok(Configuration {
        cells: cells.to_vec(),
        symbols,
    })
}

pub fn exact_entropy_rate(spec: &ProcessSpec) -> Result<f64> {
    match &spec.variant {
        ProcessVariant::Bernoulli { probs } => Ok(entropy_bits(probs)),
        ProcessVariant::MarkovLine { transition, .. } => {
            let pi = spec.marginal()?;
            Ok(pi.iter().zip(transition).map(|(p, row)| p * entropy_bits(row)).sum())
        }
        ProcessVariant::PeriodicOverlay { base, .. } => exact_entropy_rate(base),
    }
}

/// Entropy of the part of the symbol at `e` that is a function of the phase:
/// the marker entropy for overlays, zero otherwise.
pub fn pinsker_marginal_entropy(spec: &ProcessSpec) -> f64 {
    match &spec.variant {
        ProcessVariant::PeriodicOverlay { period, markers, .. } => entropy_bits(&marker_marginal(period, *markers)),
        _ => 0.0,
    }
}

/// Finite distribution over symbol tuples on an ordered cell list.
#[derive(Clone, Debug, PartialEq)]
pub struct JointTable {
    pub cells: Vec<GroupElement>,
    pub probs: BTreeMap<Vec<Symbol>, f64>,
}

impl JointTable {
    /// Empirical law of observed tuples.
    pub fn empirical(cells: Vec<GroupElement>, samples: &[Vec<Symbol>]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::input("no samples"));
        }
        let mut counts: BTreeMap<Vec<Symbol>, u64> = BTreeMap::new();
        for s in samples {
            if s.len() != cells.len() {
                return Err(Error::input("sample length differs from the cell count"));
            }
            *counts.entry(s.clone()).or_default() += 1;
        }
        let m = samples.len() as f64;
        Ok(JointTable {
            cells,
            probs: counts.into_iter().map(|(k, c)| (k, c as f64 / m)).collect(),
        })
    }

    pub fn entropy(&self) -> f64 {
        let mut ps: Vec<f64> = self.probs.values().copied().collect();
        ps.sort_by(f64::total_cmp);
        entropy_bits(&ps)
    }

    /// Law of the sub-tuple on `cells` (each must appear in the table).
    pub fn marginal(&self, cells: &[GroupElement]) -> Result<JointTable> {
        let pos: Vec<usize> = cells
            .iter()
            .map(|c| {
                self.cells
                    .iter()
                    .position(|x| x == c)
                    .ok_or_else(|| Error::input(format!("cell {c} is not in the table")))
            })
            .collect::<Result<_>>()?;
        let mut probs: BTreeMap<Vec<Symbol>, f64> = BTreeMap::new();
        for (k, p) in &self.probs {
            *probs.entry(pos.iter().map(|&i| k[i]).collect()).or_default() += p;
        }
        Ok(JointTable {
            cells: cells.to_vec(),
            probs,
        })
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

/// Exact law of the symbols on `cells`, refusing to enumerate more than
/// `budget` atoms.
pub fn exact_cylinder_law(spec: &ProcessSpec, cells: &[GroupElement], budget: f64) -> Result<JointTable> {
    for c in cells {
        spec.group.check(c)?;
    }
    let mut seen = std::collections::HashSet::new();
    if cells.iter().any(|c| !seen.insert(c)) {
        return Err(Error::input("cylinder cells must be distinct"));
    }
    let atoms = enumeration_size(spec, cells.len());
    if atoms > budget {
        return Err(Error::Budget { atoms, budget });
    }
    let mut probs = BTreeMap::new();
    enumerate(spec, cells, 1.0, &mut |tuple, p| {
        if p > 0.0 {
            *probs.entry(tuple).or_default() += p;
        }
    })?;
    Ok(JointTable {
        cells: cells.to_vec(),
        probs,
    })
}

fn enumeration_size(spec: &ProcessSpec, n: usize) -> f64 {
    match &spec.variant {
        ProcessVariant::PeriodicOverlay { base, period, .. } => {
            period.iter().product::<u64>() as f64 * enumeration_size(base, n)
        }
        _ => (spec.alphabet_size() as f64).powi(n as i32),
    }
}

fn enumerate(
    spec: &ProcessSpec,
    cells: &[GroupElement],
    weight: f64,
    emit: &mut dyn FnMut(Vec<Symbol>, f64),
) -> Result<()> {
    let n = cells.len();
    match &spec.variant {
        ProcessVariant::Bernoulli { probs } => {
            let k = probs.len();
            let mut tuple = vec![0 as Symbol; n];
            loop {
                let p: f64 = tuple.iter().map(|&s| probs[s as usize]).product();
                emit(tuple.clone(), weight * p);
                if !odometer(&mut tuple, k) {
                    break;
                }
            }
        }
        ProcessVariant::MarkovLine { transition, .. } => {
            let m = Matrix::from_rows(transition);
            let pi = spec.marginal()?;
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| cells[i].coords()[0]);
            let hops: Vec<Matrix> = order
                .windows(2)
                .map(|w| m.pow((cells[w[1]].coords()[0] - cells[w[0]].coords()[0]) as u64))
                .collect();
            let k = pi.len();
            let mut sorted = vec![0 as Symbol; n];
            if n == 0 {
                emit(Vec::new(), weight);
                return Ok(());
            }
            loop {
                let mut p = pi[sorted[0] as usize];
                for (t, h) in hops.iter().enumerate() {
                    p *= h.get(sorted[t] as usize, sorted[t + 1] as usize);
                }
                let mut tuple = vec![0 as Symbol; n];
                for (t, &pos) in order.iter().enumerate() {
                    tuple[pos] = sorted[t];
                }
                emit(tuple, weight * p);
                if !odometer(&mut sorted, k) {
                    break;
                }
            }
        }
        ProcessVariant::PeriodicOverlay { base, period, markers } => {
            let phases: u64 = period.iter().product();
            for idx in 0..phases {
                let phase = phase_of(idx, period);
                let marks: Vec<Symbol> = cells.iter().map(|g| marker_at(g, &phase, period, *markers)).collect();
                enumerate(base, cells, weight / phases as f64, &mut |tuple, p| {
                    let joined = tuple.iter().zip(&marks).map(|(s, m)| s * markers + m).collect();
                    emit(joined, p);
                })?;
            }
        }
    }
    Ok(())
}

/// Advances a base-`k` counter; false after the last tuple.
fn odometer(t: &mut [Symbol], k: usize) -> bool {
    for s in t.iter_mut().rev() {
        if (*s as usize) + 1 < k {
            *s += 1;
            return true;
        }
        *s = 0;
    }
    false
}

/// Exact `H(symbol at target | symbols at conditioners)` in bits.
pub fn exact_conditional_entropy(
    spec: &ProcessSpec,
    target: &GroupElement,
    conditioners: &[GroupElement],
) -> Result<f64> {
    exact_conditional_entropy_with_budget(spec, target, conditioners, DEFAULT_ATOM_BUDGET)
}

pub fn exact_conditional_entropy_with_budget(
    spec: &ProcessSpec,
    target: &GroupElement,
    conditioners: &[GroupElement],
    budget: f64,
) -> Result<f64> {
    let mut cond: Vec<GroupElement> = conditioners.to_vec();
    cond.sort();
    cond.dedup();
    if cond.contains(target) {
        spec.group.check(target)?;
        return Ok(0.0);
    }
    if let ProcessVariant::Bernoulli { probs } = &spec.variant {
        spec.group.check(target)?;
        return Ok(entropy_bits(probs));
    }
    let mut all = vec![*target];
    all.extend(cond.iter().cloned());
    let joint = exact_cylinder_law(spec, &all, budget)?;
    let past = joint.marginal(&cond)?;
    Ok((joint.entropy() - past.entropy()).max(0.0))
}
