//! Multiorders on lattice groups built from ordered substitution tilings,
//! with plug-in entropy estimation along the orders they induce.
//!
//! Modules, bottom-up:
//!
//! - [`group`]: ℤ and ℤ^d, finite boxes.
//! - [`order`]: finite windows of orders of type ℤ and the group action on them.
//! - [`tiling`]: ordered tiling systems, addresses, expansion into windows.
//! - [`folner`]: (K, ε)-invariance audits of order intervals.
//! - [`process`]: stationary symbolic processes with exact cylinder laws.
//! - [`entropy`]: estimators along orders, successor-map checks, Shearer and
//!   remote-past probes.
//! - [`cli`]: config-driven experiments behind the `multiorder` binary.

pub mod cli;
pub mod entropy;
pub mod error;
pub mod folner;
pub mod group;
pub mod order;
pub mod process;
pub mod seed;
pub mod tiling;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupSpec};
pub use order::{OrderWindow, Side};
pub use tiling::{Address, BuiltinTiling, TilingSystemSpec};
