//! (K, ε)-invariance of finite sets, order intervals and tiles.
//!
//! All set arithmetic is exact; ratios are kept as reduced fractions and
//! only turned into decimals for reporting.

use std::collections::HashSet;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};
use crate::order::{OrderWindow, Side};
use crate::seed;
use crate::tiling::TilingSystemSpec;

/// Exact `|KF △ F| / |F|`.
pub type InvarianceRatio = Ratio<u64>;

pub fn invariance_ratio(group: GroupSpec, set: &[GroupElement], k: &[GroupElement]) -> Result<InvarianceRatio> {
    if set.is_empty() {
        return Err(Error::input("invariance ratio of an empty set"));
    }
    let f: HashSet<&GroupElement> = set.iter().collect();
    let mut kf: HashSet<GroupElement> = HashSet::with_capacity(f.len() * k.len().max(1));
    for a in k {
        for g in &f {
            kf.insert(group.compose(a, g)?);
        }
    }
    let outside = kf.iter().filter(|c| !f.contains(c)).count();
    let missed = f.iter().filter(|c| !kf.contains(**c)).count();
    Ok(Ratio::new((outside + missed) as u64, f.len() as u64))
}

fn ratio_f64(r: &InvarianceRatio) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn serialize_ratio<S: Serializer>(r: &InvarianceRatio, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(ratio_f64(r))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvarianceRecord {
    /// `|F|`.
    pub size: usize,
    pub k_size: usize,
    #[serde(serialize_with = "serialize_ratio")]
    pub ratio: InvarianceRatio,
}

impl InvarianceRecord {
    pub fn ratio_f64(&self) -> f64 {
        ratio_f64(&self.ratio)
    }
}

/// Records for `F = [0, n]≺` (n + 1 cells) for every requested `n`.
pub fn audit_intervals(w: &OrderWindow, k: &[GroupElement], lengths: &[u64]) -> Result<Vec<InvarianceRecord>> {
    lengths
        .iter()
        .map(|&n| {
            let f = w.interval(0, n as i64)?;
            Ok(InvarianceRecord {
                size: f.len(),
                k_size: k.len(),
                ratio: invariance_ratio(w.group(), f, k)?,
            })
        })
        .collect()
}

/// `|[F, F+n]≺| / |F|` (or the backward variant).
pub fn interval_growth(w: &OrderWindow, set: &[GroupElement], n: u64, side: Side) -> Result<Ratio<u64>> {
    if set.is_empty() {
        return Err(Error::input("interval growth of an empty set"));
    }
    let distinct: HashSet<&GroupElement> = set.iter().collect();
    let union = w.interval_from_set(set, n, side)?;
    Ok(Ratio::new(union.len() as u64, distinct.len() as u64))
}

#[derive(Clone, Debug)]
pub struct UniformAuditParams {
    pub k: Vec<GroupElement>,
    pub epsilon: f64,
    /// Candidate interval lengths, counted in cells.
    pub candidates: Vec<u64>,
    pub samples: usize,
    /// Anchors per sampled order and length.
    pub anchors: usize,
    /// Depth of the sampled addresses; the top tile must hold the longest candidate.
    pub level: usize,
    pub seed: u64,
}

impl UniformAuditParams {
    pub fn new(k: Vec<GroupElement>, epsilon: f64, candidates: Vec<u64>) -> Self {
        UniformAuditParams {
            k,
            epsilon,
            candidates,
            samples: 100,
            anchors: 16,
            level: 8,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LengthStats {
    pub length: u64,
    #[serde(serialize_with = "serialize_ratio")]
    pub worst_ratio: InvarianceRatio,
    pub mean_ratio: f64,
    /// Number of audited intervals.
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct UniformAudit {
    pub epsilon: f64,
    pub threshold: Option<u64>,
    pub lengths: Vec<LengthStats>,
    /// Addresses rejected as not straight before an accepted one.
    pub resampled: usize,
}

impl UniformAudit {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        wtr.write_record(["length", "worst_ratio", "mean_ratio", "samples"])?;
        for s in &self.lengths {
            wtr.write_record([
                s.length.to_string(),
                ratio_f64(&s.worst_ratio).to_string(),
                s.mean_ratio.to_string(),
                s.samples.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Least candidate length at which every audited interval `[a, a+n−1]≺`
/// over sampled straight orders is (K, ε)-invariant.
pub fn uniform_audit(spec: &TilingSystemSpec, params: &UniformAuditParams) -> Result<UniformAudit> {
    if !(params.epsilon > 0.0) {
        return Err(Error::input("epsilon must be positive"));
    }
    if params.samples == 0 || params.anchors == 0 {
        return Err(Error::input("need at least one sample and one anchor"));
    }
    let mut candidates = params.candidates.clone();
    candidates.sort_unstable();
    candidates.dedup();
    if candidates.first() == Some(&0) {
        return Err(Error::input("interval lengths start at 1"));
    }
    for k in &params.k {
        spec.group().check(k)?;
    }

    let per_order: Vec<(Vec<Vec<InvarianceRatio>>, usize)> = (0..params.samples as u64)
        .into_par_iter()
        .map(|i| {
            let (addr, rejected) = spec.sample_straight_address(params.level, params.seed, i)?;
            let w = spec.expand(&addr)?;
            let mut rng = seed::rng(params.seed, &[i, u64::MAX]);
            let mut rows = Vec::with_capacity(candidates.len());
            for &n in &candidates {
                if n as usize > w.len() {
                    return Err(Error::window(format!(
                        "length {n} exceeds the level-{} tile of {} cells",
                        params.level,
                        w.len()
                    )));
                }
                let span = w.len() as i64 - n as i64;
                let mut ratios = Vec::with_capacity(params.anchors);
                for _ in 0..params.anchors {
                    let a = w.lo() + rng.random_range(0..=span);
                    let f = w.interval(a, a + n as i64 - 1)?;
                    ratios.push(invariance_ratio(w.group(), f, &params.k)?);
                }
                rows.push(ratios);
            }
            Ok((rows, rejected))
        })
        .collect::<Result<_>>()?;

    let mut lengths = Vec::with_capacity(candidates.len());
    let mut threshold = None;
    for (c, &n) in candidates.iter().enumerate() {
        let all: Vec<&InvarianceRatio> = per_order.iter().flat_map(|(rows, _)| &rows[c]).collect();
        let worst = **all.iter().max().expect("at least one interval");
        let mean = all.iter().map(|r| ratio_f64(r)).sum::<f64>() / all.len() as f64;
        if threshold.is_none() && ratio_f64(&worst) < params.epsilon {
            threshold = Some(n);
        }
        lengths.push(LengthStats {
            length: n,
            worst_ratio: worst,
            mean_ratio: mean,
            samples: all.len(),
        });
    }
    Ok(UniformAudit {
        epsilon: params.epsilon,
        threshold,
        lengths,
        resampled: per_order.iter().map(|(_, r)| r).sum(),
    })
}

/// Interval length that guarantees (K, ε)-invariance for every straight
/// order: pick the first level whose shapes are all (K, ε/2)-invariant, with
/// largest shape size N, and return ⌈2N/δ⌉ for δ = ε / (2(|K|+1)).
pub fn guaranteed_length(
    spec: &TilingSystemSpec,
    k: &[GroupElement],
    epsilon: f64,
    max_level: usize,
) -> Result<Option<u64>> {
    for level in 1..=max_level {
        let mut largest = 0usize;
        let mut ok = true;
        for s in 0..spec.shape_count(level)? {
            let shape = spec.shape(level, s)?;
            largest = largest.max(shape.cells.len());
            if ratio_f64(&invariance_ratio(spec.group(), &shape.cells, k)?) >= epsilon / 2.0 {
                ok = false;
                break;
            }
        }
        if ok {
            let delta = epsilon / (2.0 * (k.len() as f64 + 1.0));
            return Ok(Some((2.0 * largest as f64 / delta).ceil() as u64));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::BuiltinTiling;

    fn z(x: i64) -> GroupElement {
        GroupElement::int(x)
    }

    fn line(range: std::ops::Range<i64>) -> Vec<GroupElement> {
        range.map(z).collect()
    }

    #[test]
    fn ratio_of_integer_interval() {
        for n in 1..20 {
            let r = invariance_ratio(GroupSpec::IntLine, &line(0..n), &[z(0), z(1)]).unwrap();
            assert_eq!(r, Ratio::new(1, n as u64));
        }
    }

    #[test]
    fn identity_only_k_gives_zero() {
        let f = line(-3..9);
        let r = invariance_ratio(GroupSpec::IntLine, &f, &[z(0)]).unwrap();
        assert_eq!(r, Ratio::new(0, 1));
    }

    #[test]
    fn k_without_identity_counts_both_sides() {
        // K = {1}: KF = F + 1, symmetric difference {0, n}
        let r = invariance_ratio(GroupSpec::IntLine, &line(0..10), &[z(1)]).unwrap();
        assert_eq!(r, Ratio::new(2, 10));
    }

    #[test]
    fn square_boundary_count() {
        let g = GroupSpec::IntGrid(2);
        let cross = g.unit_cross();
        for k in 0..6 {
            let side = 1i64 << k;
            let sq: Vec<_> = (0..side)
                .flat_map(|x| (0..side).map(move |y| GroupElement::xy(x, y)))
                .collect();
            let r = invariance_ratio(g, &sq, &cross).unwrap();
            assert_eq!(r, Ratio::new(4 * side as u64, (side * side) as u64));
        }
    }

    #[test]
    fn empty_set_is_an_error() {
        assert!(invariance_ratio(GroupSpec::IntLine, &[], &[z(0)]).is_err());
    }

    #[test]
    fn monotone_in_k() {
        let f = line(0..7);
        let small = invariance_ratio(GroupSpec::IntLine, &f, &[z(0), z(1)]).unwrap();
        let big = invariance_ratio(GroupSpec::IntLine, &f, &[z(0), z(1), z(-2)]).unwrap();
        assert!(big >= small);
    }

    #[test]
    fn standard_window_audit() {
        let w = OrderWindow::standard_line(0, 64).unwrap();
        let recs = audit_intervals(&w, &[z(0), z(1)], &[0, 3, 15, 63]).unwrap();
        let ratios: Vec<_> = recs.iter().map(|r| r.ratio).collect();
        assert_eq!(
            ratios,
            vec![Ratio::new(1, 1), Ratio::new(1, 4), Ratio::new(1, 16), Ratio::new(1, 64)]
        );
        assert!(audit_intervals(&w, &[z(0)], &[65]).is_err());
    }

    #[test]
    fn growth_examples() {
        let w = OrderWindow::standard_line(-10, 120).unwrap();
        assert_eq!(
            interval_growth(&w, &[z(0)], 3, Side::Forward).unwrap(),
            Ratio::from_integer(4)
        );
        let f = line(0..100);
        let g = interval_growth(&w, &f, 5, Side::Forward).unwrap();
        assert_eq!(g, Ratio::new(105, 100));
        assert_eq!(g, interval_growth(&w, &f, 5, Side::Backward).unwrap());
        assert!(interval_growth(&w, &f, 30, Side::Forward).is_err());
    }

    #[test]
    fn growth_forward_equals_backward_on_alternating_windows() {
        let spec = TilingSystemSpec::builtin(BuiltinTiling::DyadicAlternating);
        for seed in 0..20 {
            let a = spec.sample_address(9, seed).unwrap();
            let w = spec.expand(&a).unwrap();
            let w = w.act(&w.cell(w.lo() + 200).unwrap().clone()).unwrap();
            let f: Vec<_> = w.interval(-50, 50).unwrap().iter().step_by(7).cloned().collect();
            for n in [0, 1, 5, 30] {
                let fw = interval_growth(&w, &f, n, Side::Forward).unwrap();
                let bw = interval_growth(&w, &f, n, Side::Backward).unwrap();
                assert_eq!(fw, bw);
                assert!(fw >= Ratio::from_integer(1) && fw <= Ratio::from_integer(n + 1));
            }
        }
    }

    /// Brute-force oracle on ℤ with K = {0, 1}: |KF △ F| is the number of
    /// maximal runs of consecutive integers in F.
    fn runs(cells: &[GroupElement]) -> u64 {
        let mut xs: Vec<i64> = cells.iter().map(|c| c.coords()[0]).collect();
        xs.sort_unstable();
        1 + xs.windows(2).filter(|p| p[1] != p[0] + 1).count() as u64
    }

    #[test]
    fn alternating_intervals_match_run_count() {
        let spec = TilingSystemSpec::builtin(BuiltinTiling::DyadicAlternating);
        let k = [z(0), z(1)];
        for seed in 0..10 {
            let a = spec.sample_address(10, seed).unwrap();
            let w = spec.expand(&a).unwrap();
            for (start, n) in [(0i64, 10i64), (37, 100), (500, 300)] {
                let lo = w.lo() + start;
                let f = w.interval(lo, lo + n - 1).unwrap();
                let r = invariance_ratio(GroupSpec::IntLine, f, &k).unwrap();
                assert_eq!(r, Ratio::new(runs(f), n as u64));
            }
        }
    }

    #[test]
    fn uniform_audit_small_epsilon_candidate() {
        let spec = TilingSystemSpec::builtin(BuiltinTiling::DyadicStandard);
        let mut params = UniformAuditParams::new(vec![z(0), z(1)], 0.5, vec![4, 8, 16]);
        params.samples = 5;
        params.level = 6;
        let audit = uniform_audit(&spec, &params).unwrap();
        // every interval of 4 cells has ratio exactly 1/4
        assert_eq!(audit.threshold, Some(4));
        assert_eq!(audit.lengths[0].worst_ratio, Ratio::new(1, 4));
        assert_eq!(audit.lengths[0].samples, 5 * 16);
    }

    #[test]
    fn uniform_audit_alternating_finds_threshold() {
        let spec = TilingSystemSpec::builtin(BuiltinTiling::DyadicAlternating);
        let mut params = UniformAuditParams::new(vec![z(0), z(1)], 0.1, vec![8, 32, 128, 512]);
        params.samples = 20;
        params.level = 12;
        let audit = uniform_audit(&spec, &params).unwrap();
        assert!(audit.threshold.is_some());
        let mut out = Vec::new();
        audit.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("length,worst_ratio,mean_ratio,samples\n"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn uniform_audit_rejects_bad_parameters() {
        let spec = TilingSystemSpec::builtin(BuiltinTiling::DyadicStandard);
        let mut params = UniformAuditParams::new(vec![z(0)], 0.0, vec![4]);
        assert!(uniform_audit(&spec, &params).is_err());
        params.epsilon = 0.1;
        params.level = 2;
        params.candidates = vec![8];
        assert!(uniform_audit(&spec, &params).is_err());
    }

    #[test]
    fn guaranteed_length_for_dyadic() {
        let spec = TilingSystemSpec::builtin(BuiltinTiling::DyadicStandard);
        // level k interval has ratio 2^-k < 0.05 first at k = 5 (N = 32);
        // δ = 0.1 / 6, n = ⌈64 / δ⌉ = 3840
        let n = guaranteed_length(&spec, &[z(0), z(1)], 0.1, 20).unwrap();
        assert_eq!(n, Some(3840));
    }
}
