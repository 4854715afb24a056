//! Plug-in entropy estimators along order intervals.
//!
//! All tuples are sampled in parallel batches whose random streams are
//! derived from the master seed and the batch index, so counts (and hence
//! every reported number) do not depend on the number of worker threads.

use std::collections::HashMap;
use std::hash::Hash;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::order::OrderWindow;
use crate::process::{self, Configuration, JointTable, ProcessSpec, Sampler, Symbol};
use crate::seed;
use crate::tiling::TilingSystemSpec;

const BATCH: u64 = 8192;
/// A report is undersampled when `samples < UNDERSAMPLING_FACTOR * support`.
pub const UNDERSAMPLING_FACTOR: f64 = 10.0;

// stream tags under an order index
const TAG_EXTEND: u64 = 1 << 32;
const TAG_SAMPLE: u64 = (1 << 32) + 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BiasMode {
    #[default]
    Plugin,
    MillerMadow,
}

impl std::str::FromStr for BiasMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plugin" => Ok(BiasMode::Plugin),
            "miller_madow" => Ok(BiasMode::MillerMadow),
            _ => Err(Error::input(format!("unknown bias mode {s:?}"))),
        }
    }
}

/// Entropy in bits of the empirical law given by `counts`.
pub fn plugin_entropy_from_counts(counts: impl IntoIterator<Item = u64>, bias: BiasMode) -> Result<f64> {
    let mut cs: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let m: u64 = cs.iter().sum();
    if m == 0 {
        return Err(Error::input("entropy of an empty count table"));
    }
    cs.sort_unstable();
    let mf = m as f64;
    let s: f64 = cs.iter().map(|&c| c as f64 * (c as f64).log2()).sum();
    let mut h = (mf.log2() - s / mf).max(0.0);
    if bias == BiasMode::MillerMadow {
        h += (cs.len() as f64 - 1.0) / (2.0 * mf * std::f64::consts::LN_2);
    }
    Ok(h)
}

pub fn plugin_entropy<K: Eq + Hash>(counts: &HashMap<K, u64>, bias: BiasMode) -> Result<f64> {
    plugin_entropy_from_counts(counts.values().copied(), bias)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    BlockEntropy,
    ConditionalEntropy,
    McIntegral,
    RemotePastMi,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub quantity: Quantity,
    /// Bits.
    pub estimate: f64,
    pub standard_error: f64,
    /// Configurations drawn per order.
    pub samples: u64,
    /// `n` for block entropies, `j` otherwise.
    pub truncation: u64,
    /// Distance into the past for remote-past probes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<u64>,
    pub orders: usize,
    pub bias: BiasMode,
    /// Cells per sampled tuple.
    pub tuple_len: usize,
    pub support_bound: f64,
    pub undersampled: bool,
    /// Limiting value from a closed form, when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
    /// Exact value of the truncated quantity (averaged over orders).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_truncated: Option<f64>,
    #[serde(default)]
    pub resampled_addresses: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_order: Vec<f64>,
}

impl EntropyReport {
    /// `estimate − oracle`, when an oracle is known.
    pub fn gap(&self) -> Option<f64> {
        self.oracle.map(|o| self.estimate - o)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    pub samples: u64,
    pub bias: BiasMode,
    pub seed: u64,
    /// Largest exact enumeration attempted for `exact_truncated`.
    pub atom_budget: f64,
}

impl EstimatorParams {
    pub fn new(samples: u64, seed: u64) -> Self {
        EstimatorParams {
            samples,
            bias: BiasMode::Plugin,
            seed,
            atom_budget: 1e5,
        }
    }

    pub fn with_bias(mut self, bias: BiasMode) -> Self {
        self.bias = bias;
        self
    }

    fn reseeded(&self, seed: u64) -> Self {
        EstimatorParams { seed, ..*self }
    }
}

/// Tuple counts with tuples packed into `u128`, the first cell in the
/// highest bits.
struct TupleCounts {
    bits: u32,
    len: usize,
    samples: u64,
    table: Vec<(u128, u64)>,
}

impl TupleCounts {
    fn draw(proc: &ProcessSpec, cells: &[GroupElement], samples: u64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::input("need at least one sample"));
        }
        let bits = (32 - (proc.alphabet_size().max(2) - 1).leading_zeros()).max(1);
        if bits as usize * cells.len() > 128 {
            return Err(Error::input(format!(
                "tuples of {} cells do not fit the 128-bit key",
                cells.len()
            )));
        }
        let sampler = Sampler::new(proc, cells)?;
        let batches = samples.div_ceil(BATCH);
        let merged = (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = seed::rng(seed, &[b]);
                let todo = BATCH.min(samples - b * BATCH);
                let mut buf = vec![0 as Symbol; cells.len()];
                let mut local: HashMap<u128, u64> = HashMap::new();
                for _ in 0..todo {
                    sampler.draw_into(&mut rng, &mut buf);
                    let key = buf.iter().fold(0u128, |k, &s| (k << bits) | s as u128);
                    *local.entry(key).or_default() += 1;
                }
                local
            })
            .reduce(HashMap::new, |mut a, b| {
                let (mut big, small) = if a.len() >= b.len() {
                    (a, b)
                } else {
                    (b, std::mem::take(&mut a))
                };
                for (k, c) in small {
                    *big.entry(k).or_default() += c;
                }
                big
            });
        let mut table: Vec<(u128, u64)> = merged.into_iter().collect();
        table.sort_unstable();
        Ok(TupleCounts {
            bits,
            len: cells.len(),
            samples,
            table,
        })
    }

    fn entropy(&self, bias: BiasMode) -> Result<f64> {
        plugin_entropy_from_counts(self.table.iter().map(|e| e.1), bias)
    }

    /// Counts of the sub-tuple on positions `range` (contiguous).
    fn project(&self, range: std::ops::Range<usize>) -> HashMap<u128, u64> {
        let shift = (self.len - range.end) as u32 * self.bits;
        let width = range.len() as u32 * self.bits;
        let mask = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        let mut out: HashMap<u128, u64> = HashMap::new();
        for &(k, c) in &self.table {
            let sub = if width == 0 { 0 } else { (k >> shift) & mask };
            *out.entry(sub).or_default() += c;
        }
        out
    }

    fn sub_entropy(&self, range: std::ops::Range<usize>, bias: BiasMode) -> Result<f64> {
        plugin_entropy(&self.project(range), bias)
    }

    /// Delta-method standard error of the plug-in `H(last | rest)`.
    fn conditional_se(&self) -> f64 {
        let rest = self.project(0..self.len - 1);
        let m = self.samples as f64;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &(k, c) in &self.table {
            let ck = rest[&(k >> self.bits)] as f64;
            let l = -(c as f64 / ck).log2();
            s1 += c as f64 * l;
            s2 += c as f64 * l * l;
        }
        let mean = s1 / m;
        ((s2 / m - mean * mean).max(0.0) / m).sqrt()
    }

    /// Delta-method standard error of the plug-in joint entropy.
    fn joint_se(&self) -> f64 {
        let m = self.samples as f64;
        let mut s1 = 0.0;
        let mut s2 = 0.0;
        for &(_, c) in &self.table {
            let l = -(c as f64 / m).log2();
            s1 += c as f64 * l;
            s2 += c as f64 * l * l;
        }
        let mean = s1 / m;
        ((s2 / m - mean * mean).max(0.0) / m).sqrt()
    }
}

fn undersampled(proc: &ProcessSpec, len: usize, samples: u64) -> (f64, bool) {
    let support = proc.support_bound(len);
    (support, (samples as f64) < UNDERSAMPLING_FACTOR * support)
}

fn check_groups(proc: &ProcessSpec, w: &OrderWindow) -> Result<()> {
    if proc.group != w.group() {
        return Err(Error::DimensionMismatch {
            expected: w.group().dim(),
            found: proc.group.dim(),
        });
    }
    Ok(())
}

/// `H(P^{[0,n]≺}) / (n+1)` along `w`.
pub fn block_entropy_along_order(
    proc: &ProcessSpec,
    w: &OrderWindow,
    n: u64,
    params: &EstimatorParams,
) -> Result<EntropyReport> {
    check_groups(proc, w)?;
    let cells = w.interval(0, n as i64)?;
    let counts = TupleCounts::draw(proc, cells, params.samples, params.seed)?;
    let scale = 1.0 / (n + 1) as f64;
    let (support, under) = undersampled(proc, cells.len(), params.samples);
    let exact = process::exact_cylinder_law(proc, cells, params.atom_budget)
        .ok()
        .map(|t| t.entropy() * scale);
    Ok(EntropyReport {
        quantity: Quantity::BlockEntropy,
        estimate: counts.entropy(params.bias)? * scale,
        standard_error: counts.joint_se() * scale,
        samples: params.samples,
        truncation: n,
        offset: None,
        orders: 1,
        bias: params.bias,
        tuple_len: cells.len(),
        support_bound: support,
        undersampled: under,
        oracle: process::exact_entropy_rate(proc).ok(),
        exact_truncated: exact,
        resampled_addresses: 0,
        per_order: Vec::new(),
    })
}

/// `H(symbol at target | symbols at conditioners)` estimated from one
/// sample stream; the conditioners are taken in the given order.
pub fn cond_entropy_on_cells(
    proc: &ProcessSpec,
    target: &GroupElement,
    conditioners: &[GroupElement],
    params: &EstimatorParams,
) -> Result<EntropyReport> {
    let mut cells = conditioners.to_vec();
    cells.push(*target);
    let len = cells.len();
    let counts = TupleCounts::draw(proc, &cells, params.samples, params.seed)?;
    let joint = counts.entropy(params.bias)?;
    let past = counts.sub_entropy(0..len - 1, params.bias)?;
    let (support, under) = undersampled(proc, len, params.samples);
    let exact = process::exact_conditional_entropy_with_budget(proc, target, conditioners, params.atom_budget).ok();
    Ok(EntropyReport {
        quantity: Quantity::ConditionalEntropy,
        estimate: (joint - past).max(0.0),
        standard_error: counts.conditional_se(),
        samples: params.samples,
        truncation: conditioners.len() as u64,
        offset: None,
        orders: 1,
        bias: params.bias,
        tuple_len: len,
        support_bound: support,
        undersampled: under,
        oracle: process::exact_entropy_rate(proc).ok(),
        exact_truncated: exact,
        resampled_addresses: 0,
        per_order: Vec::new(),
    })
}

/// `H(P at e | P on [−j, −1]≺)` along `w`.
pub fn cond_entropy_along_order(
    proc: &ProcessSpec,
    w: &OrderWindow,
    j: u64,
    params: &EstimatorParams,
) -> Result<EntropyReport> {
    check_groups(proc, w)?;
    let target = w.cell(0)?;
    let past: &[GroupElement] = if j == 0 { &[] } else { w.interval(-(j as i64), -1)? };
    cond_entropy_on_cells(proc, target, past, params)
}

/// `I(P at e ; P on [−n−j, −n−1]≺)` along `w`.
pub fn remote_past_mi_along_order(
    proc: &ProcessSpec,
    w: &OrderWindow,
    n: u64,
    j: u64,
    params: &EstimatorParams,
) -> Result<EntropyReport> {
    check_groups(proc, w)?;
    if j == 0 {
        return Err(Error::input("remote-past block needs j ≥ 1"));
    }
    let target = *w.cell(0)?;
    let far = w.interval(-((n + j) as i64), -(n as i64) - 1)?;
    let mut cells = far.to_vec();
    cells.push(target);
    let len = cells.len();
    let counts = TupleCounts::draw(proc, &cells, params.samples, params.seed)?;
    let h_joint = counts.entropy(params.bias)?;
    let h_past = counts.sub_entropy(0..len - 1, params.bias)?;
    let h_here = counts.sub_entropy(len - 1..len, params.bias)?;
    let mi = (h_here + h_past - h_joint).max(0.0);
    let exact = process::exact_cylinder_law(proc, &cells, params.atom_budget)
        .ok()
        .and_then(|t| {
            let p = t.marginal(far).ok()?.entropy();
            let h = t.marginal(std::slice::from_ref(&target)).ok()?.entropy();
            Some((h + p - t.entropy()).max(0.0))
        });
    let (support, under) = undersampled(proc, len, params.samples);
    Ok(EntropyReport {
        quantity: Quantity::RemotePastMi,
        estimate: mi,
        // I = H(here) − H(here | past); the conditional term dominates the noise
        standard_error: counts.conditional_se(),
        samples: params.samples,
        truncation: j,
        offset: Some(n),
        orders: 1,
        bias: params.bias,
        tuple_len: len,
        support_bound: support,
        undersampled: under,
        oracle: Some(process::pinsker_marginal_entropy(proc)),
        exact_truncated: exact,
        resampled_addresses: 0,
        per_order: Vec::new(),
    })
}

/// Sampling of the ν-random orders used by the Monte-Carlo estimators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderSampling {
    pub orders: usize,
    /// Depth of the sampled addresses.
    pub level: usize,
}

struct SampledOrder {
    window: OrderWindow,
    resampled: usize,
}

/// Straight address number `i`, expanded to a central-tile window covering
/// `before` predecessors of `e`.
fn sampled_order(spec: &TilingSystemSpec, level: usize, master: u64, i: u64, before: usize) -> Result<SampledOrder> {
    let (mut addr, resampled) = spec.sample_straight_address(level, master, i)?;
    let mut rng = seed::rng(master, &[i, TAG_EXTEND]);
    let window = spec.covering_window(&mut addr, before, 0, &mut rng)?;
    Ok(SampledOrder { window, resampled })
}

fn check_sampling(proc: &ProcessSpec, spec: &TilingSystemSpec, sampling: &OrderSampling) -> Result<()> {
    if sampling.orders == 0 || sampling.level == 0 {
        return Err(Error::input("orders and address level must be at least 1"));
    }
    if proc.group != spec.group() {
        return Err(Error::DimensionMismatch {
            expected: spec.group().dim(),
            found: proc.group.dim(),
        });
    }
    Ok(())
}

/// Averages per-order reports; the standard error is the spread across
/// orders (or the single-order error when only one order was drawn).
fn aggregate(quantity: Quantity, reports: Vec<(EntropyReport, usize)>) -> EntropyReport {
    let k = reports.len() as f64;
    let per_order: Vec<f64> = reports.iter().map(|r| r.0.estimate).collect();
    let mean = per_order.iter().sum::<f64>() / k;
    let se = if reports.len() > 1 {
        let var = per_order.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
        (var / k).sqrt()
    } else {
        reports[0].0.standard_error
    };
    let exact = reports
        .iter()
        .map(|r| r.0.exact_truncated)
        .collect::<Option<Vec<f64>>>()
        .map(|v| v.iter().sum::<f64>() / k);
    let first = &reports[0].0;
    EntropyReport {
        quantity,
        estimate: mean,
        standard_error: se,
        samples: first.samples,
        truncation: first.truncation,
        offset: first.offset,
        orders: reports.len(),
        bias: first.bias,
        tuple_len: first.tuple_len,
        support_bound: reports.iter().map(|r| r.0.support_bound).fold(0.0, f64::max),
        undersampled: reports.iter().any(|r| r.0.undersampled),
        oracle: first.oracle,
        exact_truncated: exact,
        resampled_addresses: reports.iter().map(|r| r.1).sum(),
        per_order,
    }
}

/// `∫ H(μ, P | P^{[−j,−1]≺}) dν(≺)` by averaging over sampled straight orders.
pub fn mc_integral(
    spec: &TilingSystemSpec,
    proc: &ProcessSpec,
    j: u64,
    sampling: &OrderSampling,
    params: &EstimatorParams,
) -> Result<EntropyReport> {
    check_sampling(proc, spec, sampling)?;
    let reports = (0..sampling.orders as u64)
        .into_par_iter()
        .map(|i| {
            let o = sampled_order(spec, sampling.level, params.seed, i, j as usize)?;
            let p = params.reseeded(seed::derive(params.seed, &[i, TAG_SAMPLE]));
            Ok((cond_entropy_along_order(proc, &o.window, j, &p)?, o.resampled))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(Quantity::McIntegral, reports))
}

/// Remote-past probe averaged over sampled straight orders.
pub fn remote_past_mi(
    spec: &TilingSystemSpec,
    proc: &ProcessSpec,
    n: u64,
    j: u64,
    sampling: &OrderSampling,
    params: &EstimatorParams,
) -> Result<EntropyReport> {
    check_sampling(proc, spec, sampling)?;
    let reports = (0..sampling.orders as u64)
        .into_par_iter()
        .map(|i| {
            let o = sampled_order(spec, sampling.level, params.seed, i, (n + j) as usize)?;
            let p = params.reseeded(seed::derive(params.seed, &[i, TAG_SAMPLE]));
            Ok((remote_past_mi_along_order(proc, &o.window, n, j, &p)?, o.resampled))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(aggregate(Quantity::RemotePastMi, reports))
}

/// A configuration on the cells of a window, aligned index by index.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub window: OrderWindow,
    pub config: Configuration,
}

impl Frame {
    pub fn new(window: OrderWindow, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.len() != window.len() {
            return Err(Error::input("one symbol per window cell is required"));
        }
        let config = Configuration {
            cells: window.cells().to_vec(),
            symbols,
        };
        Ok(Frame { window, config })
    }

    pub fn sample(proc: &ProcessSpec, window: OrderWindow, seed: u64) -> Result<Self> {
        let config = process::sample(proc, window.cells(), seed)?;
        Ok(Frame { window, config })
    }

    /// Symbol at the anchor `e`.
    pub fn anchor_symbol(&self) -> Result<Symbol> {
        let i = (0 - self.window.lo()) as usize;
        if !self.window.contains_index(0) {
            return Err(Error::window("anchor outside the window".to_string()));
        }
        Ok(self.config.symbols[i])
    }
}

/// The skew-product successor applied `k` times: the order moves by
/// `act(w, cells(k))` and the configuration is re-indexed by the same element.
pub fn successor_step(frame: &Frame, k: i64) -> Result<Frame> {
    if frame.config.cells.as_slice() != frame.window.cells() {
        return Err(Error::input("configuration is not aligned with its window"));
    }
    let g = *frame.window.cell(k)?;
    let window = frame.window.act(&g)?;
    // (g·x)(h) = x(h g): index i of the new window carries the old symbol at index i + k
    let config = Configuration {
        cells: window.cells().to_vec(),
        symbols: frame.config.symbols.clone(),
    };
    Ok(Frame { window, config })
}

/// Cells visited by `j` backward unit successor steps, in the coordinates
/// of `w`, listed from the earliest (`−j`) to the latest (`−1`).
pub fn successor_path(w: &OrderWindow, j: usize) -> Result<Vec<GroupElement>> {
    let group = w.group();
    let mut current = w.clone();
    let mut offset = group.identity();
    let mut visited = Vec::with_capacity(j);
    for _ in 0..j {
        let g = *current.cell(-1)?;
        offset = group.compose(&offset, &g)?;
        current = current.act(&g)?;
        visited.push(offset);
    }
    visited.reverse();
    Ok(visited)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuccessorReport {
    pub system: String,
    pub orders: usize,
    pub truncation: u64,
    pub samples: u64,
    pub bias: BiasMode,
    pub identical_sequences: bool,
    pub bit_identical: bool,
    /// Mean of the estimates conditioned on the order interval.
    pub mean_direct: f64,
    /// Mean of the estimates conditioned on the successor path.
    pub mean_successor: f64,
    pub standard_error: f64,
    pub undersampled: bool,
}

/// Compares conditioning on `[−j, −1]≺` with conditioning on the cells
/// reached by `j` backward successor steps, order by order.
pub fn successor_consistency(
    proc: &ProcessSpec,
    spec: &TilingSystemSpec,
    j: u64,
    sampling: &OrderSampling,
    params: &EstimatorParams,
) -> Result<SuccessorReport> {
    check_sampling(proc, spec, sampling)?;
    let pairs = (0..sampling.orders as u64)
        .into_par_iter()
        .map(|i| {
            let o = sampled_order(spec, sampling.level, params.seed, i, j as usize)?;
            let w = &o.window;
            let target = w.cell(0)?;
            let direct: &[GroupElement] = if j == 0 { &[] } else { w.interval(-(j as i64), -1)? };
            let walked = successor_path(w, j as usize)?;
            if let Some(pos) = (0..direct.len()).find(|&p| direct[p] != walked[p]) {
                return Err(Error::ConsistencyFailure(format!(
                    "order {i}: index {} holds {} in the window but the successor path reached {}",
                    pos as i64 - j as i64,
                    direct[pos],
                    walked[pos]
                )));
            }
            let p = params.reseeded(seed::derive(params.seed, &[i, TAG_SAMPLE]));
            let a = cond_entropy_on_cells(proc, target, direct, &p)?;
            let b = cond_entropy_on_cells(proc, target, &walked, &p)?;
            if a.estimate.to_bits() != b.estimate.to_bits() {
                return Err(Error::ConsistencyFailure(format!(
                    "order {i}: estimates {} and {} differ",
                    a.estimate, b.estimate
                )));
            }
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let k = pairs.len() as f64;
    let direct: Vec<f64> = pairs.iter().map(|p| p.0.estimate).collect();
    let mean_direct = direct.iter().sum::<f64>() / k;
    let mean_successor = pairs.iter().map(|p| p.1.estimate).sum::<f64>() / k;
    let se = if pairs.len() > 1 {
        (direct.iter().map(|x| (x - mean_direct).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        pairs[0].0.standard_error
    };
    Ok(SuccessorReport {
        system: spec.name().to_string(),
        orders: pairs.len(),
        truncation: j,
        samples: params.samples,
        bias: params.bias,
        identical_sequences: true,
        bit_identical: true,
        mean_direct,
        mean_successor,
        standard_error: se,
        undersampled: pairs.iter().any(|p| p.0.undersampled),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearerCheck {
    /// `H(F)`.
    pub lhs: f64,
    /// `(1/k) Σ_C H(C)`.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `H(F) ≤ (1/k) Σ_C H(C)` for a k-cover of the table's cells.
pub fn shearer_check(table: &JointTable, cover: &[Vec<GroupElement>], k: usize) -> Result<ShearerCheck> {
    if k == 0 {
        return Err(Error::input("cover multiplicity must be positive"));
    }
    for c in cover {
        if let Some(bad) = c.iter().find(|g| !table.cells.contains(g)) {
            return Err(Error::input(format!("cover member contains {bad}, which is outside F")));
        }
    }
    for g in &table.cells {
        let hits = cover.iter().filter(|c| c.contains(g)).count();
        if hits < k {
            return Err(Error::input(format!("cell {g} is covered {hits} < {k} times")));
        }
    }
    let lhs = table.entropy();
    let rhs = cover
        .iter()
        .map(|c| table.marginal(c).map(|t| t.entropy()))
        .sum::<Result<f64>>()?
        / k as f64;
    let slack = rhs - lhs;
    Ok(ShearerCheck {
        lhs,
        rhs,
        slack,
        holds: slack >= -1e-9,
    })
}
