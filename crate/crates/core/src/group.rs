//! Lattice groups ℤ and ℤ^d written additively.
//!
//! Elements carry their own coordinate vector; a [`GroupSpec`] fixes the
//! dimension and checks conformance. The group law is only ever accessed
//! through [`GroupSpec::compose`] / [`GroupSpec::inverse`] so that order
//! code never relies on commutativity.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub enum GroupSpec {
    IntLine,
    IntGrid(usize),
}

// ℤ and ℤ^1 are the same group.
impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
    }
}

impl Eq for GroupSpec {}

impl std::hash::Hash for GroupSpec {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dim().hash(state);
    }
}

impl GroupSpec {
    pub fn int_grid(d: usize) -> Result<Self> {
        if d == 0 || d > MAX_DIM {
            return Err(Error::input(format!("lattice dimension must be in 1..={MAX_DIM}")));
        }
        Ok(GroupSpec::IntGrid(d))
    }

    pub fn dim(&self) -> usize {
        match *self {
            GroupSpec::IntLine => 1,
            GroupSpec::IntGrid(d) => d,
        }
    }

    /// True for ℤ in either spelling.
    pub fn is_line(&self) -> bool {
        self.dim() == 1
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::zero(self.dim())
    }

    pub fn check(&self, a: &GroupElement) -> Result<()> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: a.dim(),
            });
        }
        Ok(())
    }

    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.add(b))
    }

    pub fn inverse(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check(a)?;
        Ok(a.neg())
    }

    /// Cube `{g : ‖g‖_∞ ≤ radius}` in lexicographic coordinate order.
    pub fn box_set(&self, radius: u32) -> Vec<GroupElement> {
        let d = self.dim();
        let r = i64::from(radius);
        let side = 2 * r + 1;
        let total = (side as usize).pow(d as u32);
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut g = GroupElement::zero(d);
            for slot in g.c[..d].iter_mut().rev() {
                *slot = (idx % side as usize) as i64 - r;
                idx /= side as usize;
            }
            out.push(g);
        }
        out
    }

    /// Unit cross `{e, ±e_1, …, ±e_d}`.
    pub fn unit_cross(&self) -> Vec<GroupElement> {
        let d = self.dim();
        let mut out = vec![self.identity()];
        for axis in 0..d {
            for step in [1, -1] {
                let mut g = GroupElement::zero(d);
                g.c[axis] = step;
                out.push(g);
            }
        }
        out
    }

    pub fn encode(&self, a: &GroupElement) -> Result<Vec<i64>> {
        self.check(a)?;
        Ok(a.coords().to_vec())
    }

    pub fn decode(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.dim() {
            return Err(Error::input(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        let g = GroupElement::new(coords);
        self.check(&g)?;
        Ok(g)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let kind = match self {
            GroupSpec::IntLine => "int_line",
            GroupSpec::IntGrid(_) => "int_grid",
        };
        GroupSpecRepr {
            kind: kind.to_string(),
            d: self.dim(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = GroupSpecRepr::deserialize(deserializer)?;
        match (repr.kind.as_str(), repr.d) {
            ("int_line", 1) => Ok(GroupSpec::IntLine),
            ("int_line", d) => Err(serde::de::Error::custom(format!(
                "int_line has dimension 1, got d = {d}"
            ))),
            ("int_grid", d) if d == 0 || d > MAX_DIM => {
                Err(serde::de::Error::custom(format!("int_grid needs 1 <= d <= {MAX_DIM}")))
            }
            ("int_grid", d) => Ok(GroupSpec::IntGrid(d)),
            (other, _) => Err(serde::de::Error::custom(format!("unknown group kind {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpecRepr {
    kind: String,
    #[serde(default = "one")]
    d: usize,
}

fn one() -> usize {
    1
}

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 4;

/// Element of ℤ^d; the canonical encoding is the coordinate tuple.
///
/// Coordinates live inline; slots past the dimension stay zero so the
/// derived comparisons and hashing only see the tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    c: [i64; MAX_DIM],
    d: u8,
}

impl GroupElement {
    /// Panics when `coords` is empty or longer than [`MAX_DIM`].
    pub fn new(coords: &[i64]) -> Self {
        assert!(
            !coords.is_empty() && coords.len() <= MAX_DIM,
            "group elements have 1..={MAX_DIM} coordinates"
        );
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        GroupElement {
            c,
            d: coords.len() as u8,
        }
    }

    pub fn zero(d: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&d), "dimension {d} out of range");
        GroupElement {
            c: [0; MAX_DIM],
            d: d as u8,
        }
    }

    pub fn int(x: i64) -> Self {
        Self::new(&[x])
    }

    pub fn xy(x: i64, y: i64) -> Self {
        Self::new(&[x, y])
    }

    pub fn dim(&self) -> usize {
        self.d as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.d as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.c == [0; MAX_DIM]
    }

    // Unchecked lattice arithmetic; callers have already matched dimensions.
    pub(crate) fn add(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.d, other.d);
        let mut out = *self;
        for (a, b) in out.c.iter_mut().zip(&other.c) {
            *a += b;
        }
        out
    }

    pub(crate) fn sub(&self, other: &GroupElement) -> GroupElement {
        debug_assert_eq!(self.d, other.d);
        let mut out = *self;
        for (a, b) in out.c.iter_mut().zip(&other.c) {
            *a -= b;
        }
        out
    }

    pub(crate) fn neg(&self) -> GroupElement {
        let mut out = *self;
        for a in out.c.iter_mut() {
            *a = -*a;
        }
        out
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 1 {
            return write!(f, "{}", self.c[0]);
        }
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<i64> for GroupElement {
    fn from(x: i64) -> Self {
        GroupElement::int(x)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<i64>::deserialize(deserializer)?;
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(serde::de::Error::custom(format!(
                "group element needs 1..={MAX_DIM} coordinates"
            )));
        }
        Ok(GroupElement::new(&coords))
    }
}
