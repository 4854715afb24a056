use std::collections::HashSet;

use super::*;
use crate::order::Side;

fn z(x: i64) -> GroupElement {
    GroupElement::int(x)
}

fn xy(x: i64, y: i64) -> GroupElement {
    GroupElement::xy(x, y)
}

fn spec(kind: BuiltinTiling) -> TilingSystemSpec {
    TilingSystemSpec::builtin(kind)
}

fn addr(spec: &TilingSystemSpec, top_shape: usize, digits: &[u32]) -> Address {
    Address {
        system: spec.name().to_string(),
        top_shape,
        digits: digits.to_vec(),
    }
}

#[test]
fn dyadic_standard_level_one() {
    let s = spec(BuiltinTiling::DyadicStandard);
    assert_eq!(s.shape(1, 0).unwrap().cells, vec![z(0), z(1)]);
    let r = s.rule(1, 0).unwrap();
    assert_eq!(
        r.children,
        vec![Child { shape: 0, offset: z(0) }, Child { shape: 0, offset: z(1) },]
    );
    assert_eq!(s.shape(0, 0).unwrap().cells, vec![z(0)]);
}

#[test]
fn dyadic_alternating_level_one_is_reversed() {
    let s = spec(BuiltinTiling::DyadicAlternating);
    let offs: Vec<_> = s.rule(1, 0).unwrap().children.into_iter().map(|c| c.offset).collect();
    assert_eq!(offs, vec![z(1), z(0)]);
}

#[test]
fn hilbert_level_one_cup_order() {
    let s = spec(BuiltinTiling::Hilbert);
    let cup = s.shape_index(1, "cup").unwrap();
    assert_eq!(
        s.ordered_cells(1, cup).unwrap(),
        vec![xy(0, 1), xy(0, 0), xy(1, 0), xy(1, 1)]
    );
    assert!(s.shape_index(1, "zigzag").is_err());
}

#[test]
fn builtins_validate_to_level_six() {
    for kind in BuiltinTiling::ALL {
        let report = spec(kind).validate(6);
        assert!(report.is_valid(), "{kind}: {:?}", report.violations);
        assert_eq!(report.levels_checked, 7);
    }
}

#[test]
fn level_zero_alone_validates() {
    for kind in BuiltinTiling::ALL {
        assert!(spec(kind).validate(0).is_valid());
    }
}

fn corrupted() -> TilingSystemSpec {
    let mut doc = spec(BuiltinTiling::DyadicStandard).to_document(2).unwrap();
    // second child of the level-2 rule now overlaps the first at cell 1
    doc.levels[2].rules[0].children[1].offset = z(1);
    TilingSystemSpec::from_document(doc).unwrap()
}

#[test]
fn overlapping_children_are_reported() {
    let report = corrupted().validate(2);
    assert!(!report.is_valid());
    let overlap = report
        .violations
        .iter()
        .find(|v| v.kind == ViolationKind::Overlap)
        .expect("overlap reported");
    assert_eq!(overlap.level, 2);
    assert_eq!(overlap.witness, Some(z(1)));
    assert!(report
        .violations
        .iter()
        .any(|v| v.kind == ViolationKind::Uncovered && v.witness == Some(z(3))));
}

#[test]
fn structural_violations_are_reported() {
    let mut doc = spec(BuiltinTiling::Hilbert).to_document(2).unwrap();
    let dup = doc.levels[2].rules[0].clone();
    doc.levels[2].rules.push(dup);
    doc.levels[1].rules.retain(|r| r.parent != 3);
    doc.levels[2].shapes[1].cells.retain(|c| !c.is_zero());
    let report = TilingSystemSpec::from_document(doc).unwrap().validate(2);
    let kinds: HashSet<ViolationKind> = report.violations.iter().map(|v| v.kind).collect();
    assert!(kinds.contains(&ViolationKind::NonDeterministic));
    assert!(kinds.contains(&ViolationKind::MissingRule));
    assert!(kinds.contains(&ViolationKind::MissingIdentity));
    assert!(kinds.contains(&ViolationKind::Extraneous));
}

#[test]
fn document_round_trip_preserves_expansion() {
    let hil = spec(BuiltinTiling::Hilbert);
    let doc = hil.to_document(3).unwrap();
    let json = serde_json::to_string(&doc).unwrap();
    let back = TilingSystemSpec::from_document(serde_json::from_str(&json).unwrap()).unwrap();
    assert!(back.validate(3).is_valid());
    for s in 0..4 {
        assert_eq!(back.ordered_cells(3, s).unwrap(), hil.ordered_cells(3, s).unwrap());
    }
    assert!(back.shape_count(4).is_err());
}

#[test]
fn sampled_dyadic_digits_are_binary() {
    let s = spec(BuiltinTiling::DyadicStandard);
    let mut ones = 0;
    for seed in 0..200 {
        let a = s.sample_address(10, seed).unwrap();
        assert_eq!(a.top_shape, 0);
        assert!(a.digits.iter().all(|d| *d == 1 || *d == 2));
        ones += a.digits.iter().filter(|d| **d == 1).count();
    }
    let f = ones as f64 / 2000.0;
    assert!((f - 0.5).abs() < 0.05, "digit frequency {f}");
}

#[test]
fn hilbert_top_shape_law_is_stationary() {
    let s = spec(BuiltinTiling::Hilbert);
    // child counts per parent read off the printed matrices
    let mut counts = [[0.0f64; 4]; 4];
    for p in 0..4 {
        for c in s.rule(3, p).unwrap().children {
            counts[c.shape][p] += 1.0;
        }
    }
    for row in &counts {
        // every shape occurs four times in total, so M/4 is doubly stochastic
        assert_eq!(row.iter().sum::<f64>(), 4.0);
    }
    let dist = s.shape_distribution(5).unwrap();
    for (c, row) in counts.iter().enumerate() {
        let image: f64 = row.iter().zip(&dist).map(|(m, v)| m / 4.0 * v).sum();
        assert!((image - dist[c]).abs() < 1e-12);
        assert!((dist[c] - 0.25).abs() < 1e-12);
    }
}

#[test]
fn sampling_is_deterministic() {
    let s = spec(BuiltinTiling::Hilbert);
    assert_eq!(s.sample_address(12, 99).unwrap(), s.sample_address(12, 99).unwrap());
    assert_ne!(s.sample_address(12, 99).unwrap(), s.sample_address(12, 100).unwrap());
}

#[test]
fn dyadic_standard_expands_to_natural_order() {
    let s = spec(BuiltinTiling::DyadicStandard);
    for seed in 0..20 {
        let a = s.sample_address(3, seed).unwrap();
        let w = s.expand(&a).unwrap();
        assert_eq!(w.len(), 8);
        assert!(w.iter().all(|(i, c)| *c == z(i)));
    }
}

#[test]
fn alternating_level_two_example() {
    let s = spec(BuiltinTiling::DyadicAlternating);
    // e at absolute cell 0: left half at level 2, right-to-left second at level 1
    let a = addr(&s, 0, &[1, 2]);
    let w = s.expand(&a).unwrap();
    assert_eq!(w.lo(), -1);
    assert_eq!(w.cells(), &[z(1), z(0), z(3), z(2)]);
    assert_eq!(w.succ(&z(0)).unwrap(), z(3));
    assert_eq!(w.interval(-1, 2).unwrap(), &[z(1), z(0), z(3), z(2)]);
    let iw = w.to_increments();
    assert_eq!(iw.incr, vec![z(-1), z(3), z(-1)]);
}

#[test]
fn hilbert_level_one_example() {
    let s = spec(BuiltinTiling::Hilbert);
    let a = addr(&s, s.shape_index(1, "cup").unwrap(), &[2]);
    let w = s.expand(&a).unwrap();
    assert_eq!(w.lo(), -1);
    assert_eq!(w.cells(), &[xy(0, 1), xy(0, 0), xy(1, 0), xy(1, 1)]);
}

#[test]
fn invalid_digits_are_rejected() {
    let s = spec(BuiltinTiling::DyadicStandard);
    assert!(s.expand(&addr(&s, 0, &[1, 3])).is_err());
    assert!(s.expand(&addr(&s, 0, &[0])).is_err());
    assert!(s.expand(&addr(&s, 1, &[1])).is_err());
    let mut wrong = addr(&s, 0, &[1]);
    wrong.system = "hilbert".into();
    assert!(s.expand(&wrong).is_err());
}

#[test]
fn straightness_examples() {
    let s = spec(BuiltinTiling::DyadicStandard);
    let r = s.straight_check(&addr(&s, 0, &[1; 8])).unwrap();
    assert_eq!(r.all_first_suffix_len, 8);
    assert!(!r.straight_up_to_l);
    let r = s.straight_check(&addr(&s, 0, &[2; 5])).unwrap();
    assert_eq!(r.all_last_suffix_len, 5);
    assert!(!r.straight_up_to_l);
    let r = s.straight_check(&addr(&s, 0, &[1, 2, 1, 2])).unwrap();
    assert_eq!(r.all_first_suffix_len, 1);
    assert_eq!(r.all_last_suffix_len, 0);
    assert!(r.straight_up_to_l);
}

#[test]
fn long_first_or_last_runs_are_rare() {
    let s = spec(BuiltinTiling::DyadicStandard);
    let n = 40_000;
    let long = (0..n)
        .filter(|&seed| {
            let r = s.straight_check(&s.sample_address(20, seed).unwrap()).unwrap();
            r.all_first_suffix_len >= 10 || r.all_last_suffix_len >= 10
        })
        .count();
    let f = long as f64 / n as f64;
    // P = 2·2^-10 ≈ 0.00195; binomial sd at n = 40000 is ≈ 0.00022
    assert!(f <= 2.0 * 2f64.powi(-10) + 0.001, "fraction {f}");
}

#[test]
fn central_tiles() {
    let s = spec(BuiltinTiling::DyadicStandard);
    let a = addr(&s, 0, &[1, 2, 1]);
    assert_eq!(s.central_tile(&a, 0).unwrap(), ("e".to_string(), z(0)));
    let (_, c) = s.central_tile(&a, 2).unwrap();
    assert_eq!(c, z(-2));
    let mut cells = s.central_tile_cells(&a, 2).unwrap();
    cells.sort();
    assert_eq!(cells, vec![z(-2), z(-1), z(0), z(1)]);
    assert!(s.central_tile(&a, 4).is_err());
}

#[test]
fn central_tiles_nest_and_partition() {
    for kind in BuiltinTiling::ALL {
        let s = spec(kind);
        for seed in 0..10 {
            let a = s.sample_address(6, seed).unwrap();
            let path = s.central_path(&a).unwrap();
            let mut prev: HashSet<GroupElement> = HashSet::new();
            for k in 0..=6 {
                let cells: HashSet<GroupElement> = s.central_tile_cells(&a, k).unwrap().into_iter().collect();
                assert!(cells.contains(&s.group().identity()));
                assert!(prev.is_subset(&cells));
                let w = s.expand_level(&a, k).unwrap();
                let expanded: HashSet<GroupElement> = w.cells().iter().cloned().collect();
                assert_eq!(expanded.len(), path.sizes[k]);
                assert_eq!(expanded, cells);
                prev = cells;
            }
        }
    }
}

#[test]
fn order_agrees_with_subtile_indices() {
    for kind in BuiltinTiling::ALL {
        let s = spec(kind);
        let a = s.sample_address(4, 5).unwrap();
        let w = s.expand(&a).unwrap();
        let path = s.central_path(&a).unwrap();
        let top = 4;
        let rule = s.rule(top, path.shapes[top]).unwrap();
        let base = path.positions[top].neg();
        // subtile index of every cell of the top tile
        let mut owner = std::collections::HashMap::new();
        for (i, child) in rule.children.iter().enumerate() {
            let sub = s.shape(top - 1, child.shape).unwrap();
            for c in sub.cells {
                owner.insert(c.add(&child.offset).add(&base), i);
            }
        }
        for (ia, ca) in w.iter() {
            for (ib, cb) in w.iter() {
                let (oa, ob) = (owner[ca], owner[cb]);
                if oa != ob {
                    assert_eq!(ia < ib, oa < ob, "{kind}");
                }
            }
        }
    }
}

#[test]
fn speeding_up_preserves_the_order() {
    for kind in BuiltinTiling::ALL {
        let s = spec(kind);
        let levels = [0, 2, 3, 5];
        let fast = s.speed_up(&levels).unwrap();
        assert!(fast.validate(3).is_valid(), "{kind}");
        for seed in 0..10 {
            let a = s.sample_address(5, seed).unwrap();
            let b = s.speed_up_address(&a, &levels).unwrap();
            assert_eq!(b.level(), 3);
            assert_eq!(fast.expand(&b).unwrap(), s.expand(&a).unwrap(), "{kind} seed {seed}");
        }
    }
}

#[test]
fn hilbert_curve_is_continuous() {
    let s = spec(BuiltinTiling::Hilbert);
    let cup = s.shape_index(1, "cup").unwrap();
    for k in 1..=8 {
        let side = 1i64 << k;
        let cells = s.ordered_cells(k, cup).unwrap();
        assert_eq!(cells.len(), (side * side) as usize);
        let distinct: HashSet<&GroupElement> = cells.iter().collect();
        assert_eq!(distinct.len(), cells.len());
        for c in &cells {
            assert!(c.coords().iter().all(|&v| (0..side).contains(&v)));
        }
        for pair in cells.windows(2) {
            assert_eq!(pair[1].sub(&pair[0]).coords().iter().map(|v| v.abs()).sum::<i64>(), 1);
        }
    }
}

#[test]
fn hilbert_cup_corner_visit() {
    let s = spec(BuiltinTiling::Hilbert);
    let cup = s.shape_index(1, "cup").unwrap();
    assert_eq!(s.ordered_cells(1, cup).unwrap()[1], xy(0, 0));
    // from level 2 on the curve enters through the top-left quadrant, so the
    // bottom-left corner is reached later: (0,3),(1,3),(1,2),(0,2),(0,1),(0,0)
    let level2 = s.ordered_cells(2, cup).unwrap();
    assert_eq!(level2.iter().position(|c| *c == xy(0, 0)), Some(5));
}

#[test]
fn hilbert_inverse_of_kth_cell_differs_from_minus_kth() {
    let s = spec(BuiltinTiling::Hilbert);
    let a = s.sample_address(4, 3).unwrap();
    let w = s.expand(&a).unwrap();
    let witness = (1..=w.hi().min(-w.lo())).find(|&k| {
        let inv = s.group().inverse(w.cell(k).unwrap()).unwrap();
        inv != *w.cell(-k).unwrap()
    });
    assert!(witness.is_some());
}

#[test]
fn act_composes_on_tiling_windows() {
    for kind in BuiltinTiling::ALL {
        let s = spec(kind);
        let a = s.sample_address(3, 11).unwrap();
        let w = s.expand(&a).unwrap();
        let g = s.group();
        for (_, x) in w.iter() {
            let wx = w.act(x).unwrap();
            for (_, y) in wx.iter() {
                let lhs = wx.act(y).unwrap();
                let rhs = w.act(&g.compose(y, x).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn interval_union_matches_brute_force() {
    let s = spec(BuiltinTiling::Hilbert);
    let a = s.sample_address(5, 21).unwrap();
    let mut w = s.expand(&a).unwrap();
    // re-anchor at the first cell of the level-1 central tile
    let path = s.central_path(&a).unwrap();
    let start = -(path.ranks[1] as i64);
    w = w.act(&w.cell(start).unwrap().clone()).unwrap();
    let tile: Vec<GroupElement> = w.interval(0, 3).unwrap().to_vec();
    for side in [Side::Forward, Side::Backward] {
        if side == Side::Backward && w.lo() > -4 {
            continue;
        }
        let got = w.interval_from_set(&tile, 4, side).unwrap();
        let mut brute = HashSet::new();
        for g in &tile {
            let i = w.index_of(g).unwrap();
            for m in 0..=4 {
                let j = if side == Side::Forward { i + m } else { i - m };
                brute.insert(*w.cell(j).unwrap());
            }
        }
        assert_eq!(got, brute);
        assert!(got.len() <= 5 * tile.len());
        assert_eq!(got.len(), 8);
    }
}

#[test]
fn covering_window_extends_upward() {
    let s = spec(BuiltinTiling::DyadicAlternating);
    let mut rng = crate::seed::rng(5, &[]);
    let mut a = addr(&s, 0, &[1, 1]);
    let w = s.covering_window(&mut a, 20, 20, &mut rng).unwrap();
    assert!(w.lo() <= -20 && w.hi() >= 20);
    assert!(a.level() > 2);
    // the old digits survive at the bottom
    assert_eq!(&a.digits[a.level() - 2..], &[1, 1]);
    assert_eq!(w, s.expand_level(&a, w.len().trailing_zeros() as usize).unwrap());
}
