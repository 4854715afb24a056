//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use multiorder::entropy::{self, EstimatorParams, OrderSampling};
use multiorder::folner::{self, UniformAuditParams};
use multiorder::process::{self, ProcessSpec};
use multiorder::{BuiltinTiling, GroupElement, GroupSpec, OrderWindow, Side, TilingSystemSpec};

const BIN: &str = env!("CARGO_BIN_EXE_multiorder");

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within_budget(o: Outcome, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    match limit {
        Some(l) if elapsed > l => outcome(false, format!("{}; over the {:?} limit", o.detail, l)),
        _ => o,
    }
}

fn round_trips() -> Outcome {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for kind in BuiltinTiling::ALL {
        let spec = TilingSystemSpec::builtin(kind);
        let group = spec.group();
        let bad: usize = (0..1000u64)
            .into_par_iter()
            .map(|seed| {
                let a = spec.sample_address(8, seed).unwrap();
                let w = spec.expand(&a).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut bad = 0;
                if OrderWindow::from_increments(&w.to_increments()).unwrap() != w {
                    bad += 1;
                }
                for _ in 0..2 {
                    let k = rng.random_range(w.lo()..=w.hi());
                    let g = *w.cell(k).unwrap();
                    let ginv = group.inverse(&g).unwrap();
                    let a = w.act(&g).unwrap();
                    if a.lo() != w.lo() - k || a.hi() != w.hi() - k {
                        bad += 1;
                        continue;
                    }
                    // g⁻¹ sits at index −k of the shifted order
                    if a.cell(-k).unwrap() != &ginv {
                        bad += 1;
                    }
                    let shifted_ok = (a.lo()..=a.hi())
                        .all(|i| a.cell(i).unwrap() == &group.compose(w.cell(i + k).unwrap(), &ginv).unwrap());
                    if !shifted_ok {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        failures += bad;
        checked += 1000;
    }
    outcome(failures == 0, format!("{checked} windows at L=8, {failures} failures"))
}

fn tiling_validity() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in BuiltinTiling::ALL {
        let r = TilingSystemSpec::builtin(kind).validate(6);
        ok &= r.is_valid() && r.levels_checked >= 6;
        parts.push(format!(
            "{kind}: {} rules, {} violations",
            r.rules_checked,
            r.violations.len()
        ));
    }
    outcome(ok, parts.join("; "))
}

fn hilbert_structure() -> Outcome {
    let spec = TilingSystemSpec::builtin(BuiltinTiling::Hilbert);
    let mut problems = Vec::new();
    for k in 0..=8usize {
        for s in 0..spec.shape_count(k).unwrap() {
            let cells = spec.ordered_cells(k, s).unwrap();
            let side = 1i64 << k;
            let distinct: HashSet<_> = cells.iter().collect();
            let inside = cells.iter().all(|c| c.coords().iter().all(|&x| (0..side).contains(&x)));
            let adjacent = cells.windows(2).all(|p| {
                let d: i64 = p[0]
                    .coords()
                    .iter()
                    .zip(p[1].coords())
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                d == 1
            });
            if cells.len() != (side * side) as usize || distinct.len() != cells.len() || !inside || !adjacent {
                problems.push(format!("level {k} shape {s}"));
            }
        }
    }
    let golden =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/hilbert_level4.csv")).unwrap();
    let dumped = Command::new(BIN)
        .args(["tiling", "dump", "--name", "hilbert", "--level", "4", "--shape", "cup"])
        .output()
        .unwrap();
    let dumped = String::from_utf8(dumped.stdout).unwrap();
    let golden_ok = dumped == golden && golden.lines().count() == 257;
    if !golden_ok {
        problems.push("level-4 golden file differs".into());
    }
    outcome(
        problems.is_empty(),
        if problems.is_empty() {
            "all shapes k ≤ 8 fill the square once with unit steps; golden file matches (256 rows)".to_string()
        } else {
            problems.join(", ")
        },
    )
}

fn folner_property() -> Outcome {
    let spec = TilingSystemSpec::builtin(BuiltinTiling::Hilbert);
    let cross = GroupSpec::IntGrid(2).unit_cross();
    let level = 8usize;
    let worst: Vec<Ratio<u64>> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let (a, _) = spec.sample_straight_address(level, 404, i).unwrap();
            let w = spec.expand(&a).unwrap();
            (1..=6usize)
                .map(|k| {
                    let tile = spec.expand_level(&a, k).unwrap();
                    let f = w.interval(tile.lo(), tile.hi()).unwrap();
                    let cells: HashSet<_> = spec.central_tile_cells(&a, k).unwrap().into_iter().collect();
                    assert_eq!(f.iter().cloned().collect::<HashSet<_>>(), cells);
                    folner::invariance_ratio(w.group(), f, &cross).unwrap()
                })
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![Ratio::from_integer(0); 6],
            |a, b| a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect(),
        );
    let exact = worst
        .iter()
        .enumerate()
        .all(|(i, r)| *r == Ratio::new(4, 1u64 << (i + 1)));

    let mut params = UniformAuditParams::new(cross.clone(), 0.1, vec![16, 64, 256, 1024, 4096, 16384]);
    params.samples = 100;
    params.level = level;
    params.seed = 405;
    let audit = folner::uniform_audit(&spec, &params).unwrap();
    let bound = folner::guaranteed_length(&spec, &cross, 0.1, 16).unwrap();
    let detail = format!(
        "tile ratios {:?}; audit threshold {:?} (worst at threshold {}), guaranteed length {:?}",
        worst
            .iter()
            .map(|r| format!("{}/{}", r.numer(), r.denom()))
            .collect::<Vec<_>>(),
        audit.threshold,
        audit
            .lengths
            .iter()
            .find(|l| Some(l.length) == audit.threshold)
            .map(|l| *l.worst_ratio.numer() as f64 / *l.worst_ratio.denom() as f64)
            .unwrap_or(f64::NAN),
        bound
    );
    outcome(exact && audit.threshold.is_some(), detail)
}

fn interval_growth_instance() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for kind in [BuiltinTiling::DyadicStandard, BuiltinTiling::DyadicAlternating] {
        let spec = TilingSystemSpec::builtin(kind);
        for seed in 0..20u64 {
            let (mut a, _) = spec.sample_straight_address(12, 55, seed).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = spec.covering_window(&mut a, 300, 300, &mut rng).unwrap();
            for k in 1..=8usize {
                let tile = spec.central_tile_cells(&a, k).unwrap();
                let expected = Ratio::new((1u64 << k) + 5, 1u64 << k);
                let fw = folner::interval_growth(&w, &tile, 5, Side::Forward);
                let bw = folner::interval_growth(&w, &tile, 5, Side::Backward);
                match (fw, bw) {
                    (Ok(f), Ok(b)) if f == expected && b == expected => checked += 1,
                    (f, b) => bad.push(format!("{kind} seed {seed} k {k}: {f:?} {b:?}")),
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} tiles: growth = 1 + 5/2^k exactly, forward = backward")
        } else {
            bad.join("; ")
        },
    )
}

fn entropy_formula() -> Outcome {
    let chain = ProcessSpec::symmetric_flip(0.1).unwrap();
    let rate = process::exact_entropy_rate(&chain).unwrap();
    let alt = TilingSystemSpec::builtin(BuiltinTiling::DyadicAlternating);
    let sampling = OrderSampling { orders: 200, level: 16 };
    let r = entropy::mc_integral(&alt, &chain, 12, &sampling, &EstimatorParams::new(100_000, 2024)).unwrap();
    let mut ok = (r.estimate - 0.469).abs() <= 0.03 && !r.undersampled;
    let mut detail = format!(
        "markov/alternating j=12: {:.4} ± {:.4} (rate {:.4}, exact truncated {:.4})",
        r.estimate,
        r.standard_error,
        rate,
        r.exact_truncated.unwrap_or(f64::NAN)
    );
    let hilbert = TilingSystemSpec::builtin(BuiltinTiling::Hilbert);
    let coin = ProcessSpec::fair_coin(GroupSpec::IntGrid(2));
    for j in [0u64, 4, 8] {
        let r = entropy::mc_integral(&hilbert, &coin, j, &sampling, &EstimatorParams::new(100_000, 2025 + j)).unwrap();
        ok &= (r.estimate - 1.0).abs() <= 0.02 && !r.undersampled;
        detail.push_str(&format!("; bernoulli/hilbert j={j}: {:.4}", r.estimate));
    }
    outcome(ok, detail)
}

fn entropy_config(
    dir: &Path,
    name: &str,
    tiling: &str,
    process: &str,
    tasks: &str,
    orders: usize,
    samples: u64,
) -> std::path::PathBuf {
    let text = format!(
        r#"{{
  "schema_version": 1,
  "seed": 31337,
  "output": {{"dir": "out", "name": "{name}"}},
  "experiment": {{
    "kind": "entropy",
    "tiling": "{tiling}",
    "process": {process},
    "samples": {samples},
    "orders": {orders},
    "level": 10,
    "tasks": {tasks}
  }}
}}
"#
    );
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, text).unwrap();
    path
}

const CHAIN: &str =
    r#"{"group": {"kind": "int_line"}, "variant": {"type": "markov_line", "transition": [[0.9, 0.1], [0.1, 0.9]]}}"#;
const COIN2: &str = r#"{"group": {"kind": "int_grid", "d": 2}, "variant": {"type": "bernoulli", "probs": [0.5, 0.5]}}"#;

fn orbit_consistency() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (tiling, proc) in [
        ("dyadic_standard", CHAIN),
        ("dyadic_alternating", CHAIN),
        ("hilbert", COIN2),
    ] {
        let cfg = entropy_config(
            dir.path(),
            tiling,
            tiling,
            proc,
            r#"[{"estimator": "successor_consistency", "j": 16}]"#,
            100,
            4000,
        );
        let status = Command::new(BIN).args(["run", "--config"]).arg(&cfg).status().unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("out").join(format!("{tiling}.json"))).unwrap_or_default(),
        )
        .unwrap_or_default();
        let r = &report["result"][0]["report"];
        let good = status.code() == Some(0)
            && r["identical_sequences"] == true
            && r["bit_identical"] == true
            && r["orders"] == 100
            && r["mean_direct"] == r["mean_successor"];
        ok &= good;
        parts.push(format!("{tiling}: exit {:?}, identical {}", status.code(), good));
    }
    outcome(ok, parts.join("; "))
}

fn shearer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut min_slack = f64::INFINITY;
    let mut failures = 0;
    for t in 0..50 {
        let (proc, cells): (ProcessSpec, Vec<GroupElement>) = if t % 2 == 0 {
            let k = rng.random_range(2..=3usize);
            let rows = (0..k)
                .map(|_| {
                    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
                    let s: f64 = raw.iter().sum();
                    let mut row: Vec<f64> = raw.iter().map(|x| x / s).collect();
                    let tail: f64 = row[..k - 1].iter().sum();
                    row[k - 1] = 1.0 - tail;
                    row
                })
                .collect();
            let mut xs: Vec<i64> = (-6..=6).collect();
            shuffle(&mut xs, &mut rng);
            let n = rng.random_range(2..=6);
            (
                ProcessSpec::markov_line(rows).unwrap(),
                xs[..n].iter().map(|&x| GroupElement::int(x)).collect(),
            )
        } else {
            let p = rng.random_range(0.05..0.95);
            let mut pts = GroupSpec::IntGrid(2).box_set(2);
            shuffle(&mut pts, &mut rng);
            let n = rng.random_range(2..=6);
            (
                ProcessSpec::bernoulli(GroupSpec::IntGrid(2), vec![p, 1.0 - p]).unwrap(),
                pts[..n].to_vec(),
            )
        };
        let k = rng.random_range(1..=3usize);
        let cover = random_cover(&cells, k, &mut rng);
        let table = process::exact_cylinder_law(&proc, &cells, 1e6).unwrap();
        let r = entropy::shearer_check(&table, &cover, k).unwrap();
        min_slack = min_slack.min(r.slack);
        failures += usize::from(!r.holds);
    }
    outcome(
        failures == 0,
        format!("50 instances, {failures} violations, minimum slack {min_slack:.3e}"),
    )
}

fn shuffle<T>(v: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}

/// Random subsets, topped up until every cell lies in at least `k` of them.
fn random_cover(cells: &[GroupElement], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<GroupElement>> {
    let members = rng.random_range(k..=k + 3);
    let mut cover: Vec<Vec<GroupElement>> = (0..members)
        .map(|_| cells.iter().filter(|_| rng.random_bool(0.5)).cloned().collect())
        .collect();
    for c in cells {
        while cover.iter().filter(|m| m.contains(c)).count() < k {
            let i = rng.random_range(0..cover.len());
            if !cover[i].contains(c) {
                cover[i].push(*c);
            }
        }
    }
    cover.retain(|m| !m.is_empty());
    cover
}

fn pinsker_probe() -> Outcome {
    let sampling = OrderSampling { orders: 20, level: 10 };
    let standard = TilingSystemSpec::builtin(BuiltinTiling::DyadicStandard);
    let alternating = TilingSystemSpec::builtin(BuiltinTiling::DyadicAlternating);
    let coin = ProcessSpec::fair_coin(GroupSpec::IntLine);
    let overlay = ProcessSpec::periodic_overlay(coin.clone(), vec![2], 2).unwrap();
    let params = EstimatorParams::new(100_000, 99);
    let b = entropy::remote_past_mi(&standard, &coin, 4, 8, &sampling, &params).unwrap();
    let b_alt = entropy::remote_past_mi(&alternating, &coin, 4, 8, &sampling, &params).unwrap();
    let s = entropy::remote_past_mi(&standard, &overlay, 4, 8, &sampling, &params).unwrap();
    let a = entropy::remote_past_mi(&alternating, &overlay, 4, 8, &sampling, &params).unwrap();
    let ok = b.estimate <= 0.02
        && b_alt.estimate <= 0.02
        && (s.estimate - 1.0).abs() <= 0.05
        && (a.estimate - 1.0).abs() <= 0.05
        && ![&b, &b_alt, &s, &a].iter().any(|r| r.undersampled);
    outcome(
        ok,
        format!(
            "bernoulli {:.4} (standard) {:.4} (alternating); overlay {:.4} (standard) {:.4} (alternating)",
            b.estimate, b_alt.estimate, s.estimate, a.estimate
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let tasks = r#"[{"estimator": "mc_integral", "j": 6}, {"estimator": "remote_past_mi", "n": 2, "j": 4}, {"estimator": "successor_consistency", "j": 8}]"#;
    let cfg = entropy_config(dir.path(), "det", "dyadic_alternating", CHAIN, tasks, 8, 30_000);
    let audit = dir.path().join("audit.json");
    std::fs::write(
        &audit,
        r#"{"schema_version": 1, "seed": 5, "output": {"dir": "out", "name": "audit"},
            "experiment": {"kind": "folner_audit", "tiling": "hilbert", "k": "unit_cross",
                           "epsilon": 0.2, "candidates": [16, 256, 1024], "samples": 10, "level": 6}}"#,
    )
    .unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "4", "1"] {
        let mut bytes = Vec::new();
        for c in [&cfg, &audit] {
            let st = Command::new(BIN)
                .args(["--threads", threads, "run", "--config"])
                .arg(c)
                .status()
                .unwrap();
            assert!(st.success());
        }
        for f in ["det.json", "det.csv", "audit.json", "audit.csv"] {
            bytes.push(std::fs::read(dir.path().join("out").join(f)).unwrap());
        }
        runs.push(bytes);
    }
    let same = runs.windows(2).all(|p| p[0] == p[1]);
    outcome(
        same,
        format!("entropy and audit reports byte-identical across 3 runs (threads 1, 4, 1): {same}"),
    )
}

fn main() {
    let criteria: Vec<(u32, &str, fn() -> Outcome, Option<u64>)> = vec![
        (1, "representation round-trips", round_trips, Some(10)),
        (2, "tiling validity", tiling_validity, Some(30)),
        (3, "hilbert curve structure", hilbert_structure, None),
        (4, "følner property", folner_property, Some(120)),
        (5, "interval growth", interval_growth_instance, None),
        (6, "entropy formula", entropy_formula, Some(600)),
        (7, "orbit-equivalence consistency", orbit_consistency, None),
        (8, "shearer inequality", shearer, None),
        (9, "pinsker probe", pinsker_probe, Some(300)),
        (10, "determinism", determinism, None),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, f, limit) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let o = within_budget(o, elapsed, limit.map(Duration::from_secs));
        println!(
            "criterion {id:>2} {}: {name} [{:.1}s] {}",
            if o.pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
