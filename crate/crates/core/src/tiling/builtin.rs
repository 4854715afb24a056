//! Built-in ordered tiling systems: the dyadic odometer on ℤ with two
//! subtile orderings, and the Hilbert system on ℤ².

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Child, SubstitutionRule};
use crate::error::Error;
use crate::group::GroupElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinTiling {
    /// Intervals of length 2^k, subtiles left to right.
    DyadicStandard,
    /// Same tiles; subtiles left to right at even levels, right to left at odd.
    DyadicAlternating,
    /// 2^k × 2^k squares with four labeled shapes following the Hilbert curve.
    Hilbert,
}

impl BuiltinTiling {
    pub const ALL: [BuiltinTiling; 3] = [
        BuiltinTiling::DyadicStandard,
        BuiltinTiling::DyadicAlternating,
        BuiltinTiling::Hilbert,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinTiling::DyadicStandard => "dyadic_standard",
            BuiltinTiling::DyadicAlternating => "dyadic_alternating",
            BuiltinTiling::Hilbert => "hilbert",
        }
    }
}

impl fmt::Display for BuiltinTiling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinTiling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinTiling::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::input(format!("unknown tiling system {s:?}")))
    }
}

pub(crate) const CUP: usize = 0;
pub(crate) const SUB: usize = 1;
pub(crate) const SUP: usize = 2;
pub(crate) const CAP: usize = 3;

/// ⊔, ⊏, ⊐, ⊓.
pub(crate) const HILBERT_LABELS: [&str; 4] = ["cup", "sub", "sup", "cap"];

/// Subdivision of each Hilbert shape: quadrant shapes and their enumeration,
/// row 0 = top, column 0 = left.
const HILBERT_MATRICES: [([[usize; 2]; 2], [[usize; 2]; 2]); 4] = [
    // ⊔ = [⊐ ⊏; ⊔ ⊔] [1 4; 2 3]
    ([[SUP, SUB], [CUP, CUP]], [[1, 4], [2, 3]]),
    // ⊏ = [⊏ ⊔; ⊏ ⊓] [3 4; 2 1]
    ([[SUB, CUP], [SUB, CAP]], [[3, 4], [2, 1]]),
    // ⊐ = [⊔ ⊐; ⊓ ⊐] [1 2; 4 3]
    ([[CUP, SUP], [CAP, SUP]], [[1, 2], [4, 3]]),
    // ⊓ = [⊓ ⊓; ⊐ ⊏] [3 2; 4 1]
    ([[CAP, CAP], [SUP, SUB]], [[3, 2], [4, 1]]),
];

pub(crate) fn shape_count(kind: BuiltinTiling, level: usize) -> usize {
    match kind {
        BuiltinTiling::Hilbert if level > 0 => 4,
        _ => 1,
    }
}

pub(crate) fn shape_label(kind: BuiltinTiling, level: usize, shape: usize) -> String {
    if level == 0 {
        return "e".to_string();
    }
    match kind {
        BuiltinTiling::Hilbert => HILBERT_LABELS[shape].to_string(),
        _ => "interval".to_string(),
    }
}

pub(crate) fn shape_size(kind: BuiltinTiling, level: usize) -> usize {
    match kind {
        BuiltinTiling::Hilbert => 1usize << (2 * level),
        _ => 1usize << level,
    }
}

/// Declared cell set of a level-`level` shape, independent of the rules.
pub(crate) fn shape_cells(kind: BuiltinTiling, level: usize) -> Vec<GroupElement> {
    let side = 1i64 << level;
    match kind {
        BuiltinTiling::Hilbert => (0..side)
            .flat_map(|x| (0..side).map(move |y| GroupElement::xy(x, y)))
            .collect(),
        _ => (0..side).map(GroupElement::int).collect(),
    }
}

/// Rule splitting the level-`level` shape `shape` into level-(level−1) subtiles.
pub(crate) fn rule(kind: BuiltinTiling, level: usize, shape: usize) -> SubstitutionRule {
    debug_assert!(level >= 1);
    let half = 1i64 << (level - 1);
    let children = match kind {
        BuiltinTiling::DyadicStandard | BuiltinTiling::DyadicAlternating => {
            let mut c = vec![
                Child {
                    shape: 0,
                    offset: GroupElement::int(0),
                },
                Child {
                    shape: 0,
                    offset: GroupElement::int(half),
                },
            ];
            if kind == BuiltinTiling::DyadicAlternating && level % 2 == 1 {
                c.reverse();
            }
            c
        }
        BuiltinTiling::Hilbert => {
            let (shapes, enumeration) = HILBERT_MATRICES[shape];
            let mut slots: Vec<(usize, Child)> = Vec::with_capacity(4);
            for (row, (shape_row, enum_row)) in shapes.iter().zip(enumeration.iter()).enumerate() {
                for col in 0..2 {
                    let x = col as i64 * half;
                    let y = if row == 0 { half } else { 0 };
                    let child_shape = if level == 1 { 0 } else { shape_row[col] };
                    slots.push((
                        enum_row[col],
                        Child {
                            shape: child_shape,
                            offset: GroupElement::xy(x, y),
                        },
                    ));
                }
            }
            slots.sort_by_key(|(rank, _)| *rank);
            slots.into_iter().map(|(_, c)| c).collect()
        }
    };
    SubstitutionRule {
        parent: shape,
        children,
    }
}

/// Labels of the quadrant subtiles as printed, for documentation and tests.
pub fn hilbert_subdivision(label: &str) -> Option<[[&'static str; 2]; 2]> {
    let idx = HILBERT_LABELS.iter().position(|l| *l == label)?;
    let (shapes, _) = HILBERT_MATRICES[idx];
    Some(shapes.map(|row| row.map(|s| HILBERT_LABELS[s])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in BuiltinTiling::ALL {
            assert_eq!(b.name().parse::<BuiltinTiling>().unwrap(), b);
        }
        assert!("penrose".parse::<BuiltinTiling>().is_err());
    }

    #[test]
    fn dyadic_level_one() {
        let r = rule(BuiltinTiling::DyadicStandard, 1, 0);
        let offs: Vec<_> = r.children.iter().map(|c| c.offset).collect();
        assert_eq!(offs, vec![GroupElement::int(0), GroupElement::int(1)]);
        let r = rule(BuiltinTiling::DyadicAlternating, 1, 0);
        let offs: Vec<_> = r.children.iter().map(|c| c.offset).collect();
        assert_eq!(offs, vec![GroupElement::int(1), GroupElement::int(0)]);
        let r = rule(BuiltinTiling::DyadicAlternating, 2, 0);
        let offs: Vec<_> = r.children.iter().map(|c| c.offset).collect();
        assert_eq!(offs, vec![GroupElement::int(0), GroupElement::int(2)]);
    }

    #[test]
    fn hilbert_cup_children_follow_printed_enumeration() {
        let r = rule(BuiltinTiling::Hilbert, 3, CUP);
        let got: Vec<(usize, GroupElement)> = r.children.iter().map(|c| (c.shape, c.offset)).collect();
        assert_eq!(
            got,
            vec![
                (SUP, GroupElement::xy(0, 4)),
                (CUP, GroupElement::xy(0, 0)),
                (CUP, GroupElement::xy(4, 0)),
                (SUB, GroupElement::xy(4, 4)),
            ]
        );
        assert_eq!(hilbert_subdivision("cap").unwrap(), [["cap", "cap"], ["sup", "sub"]]);
    }
}
