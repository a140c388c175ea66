//! Recover the generator points of a planar Voronoi tessellation from the
//! tessellation alone.
//!
//! One bounded interior *anchor* cell with `k` neighbors yields a tall linear
//! system (`4k` equations, `2(k+1)` unknowns) whose solution is the anchor's
//! generator together with all of its neighbors'. Every other generator then
//! follows by mirroring a known generator across a shared ridge, breadth-first.

pub mod anchor;
pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod forward;
pub mod geom;
pub mod propagate;
pub mod solver;
pub mod tessellation;

pub use error::{Error, Result};
