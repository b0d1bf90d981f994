//! Self-avoiding-walk trees and biased random walks on rooted trees.
//!
//! This crate is `no_std` (it needs `alloc`). It holds the algorithmic part of
//! the toolkit: lattice domains, lazily expanded self-avoiding trees, the
//! gallery of spherically symmetric / periodic / joined / grafted trees,
//! truncated effective conductance with certified intervals, the biased walk
//! simulator with limit-walk samplers, and exact bridge combinatorics.
//! File formats, the command line and parallel drivers live in the `sawtree`
//! crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod combinatorics;
pub mod conductance;
mod error;
pub mod gallery;
pub mod lattice;
pub mod numeric;
pub mod rng;
pub mod saw_tree;
pub mod tree;
pub mod walk;

pub use error::{Error, Result};
pub use lattice::{Dir, DomainSpec, LatticePoint};
pub use saw_tree::{FiniteWalk, SawTree};
pub use tree::{TreeCursor, TreeModel, TreePath};
