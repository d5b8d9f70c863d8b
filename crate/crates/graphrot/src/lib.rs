//! Rotation elements of vertex maps on graphs.
//!
//! A vertex map on a finite connected graph permutes the vertices and drags
//! each vertex along a chosen track path; edges follow by tightening.  Lifted
//! to the universal cover — a tree, labeled coherently over a spanning tree —
//! the dynamics become combinatorial: a period-`n` point whose chosen lift is
//! translated by the deck word `w` gets the rotation element `w^{1/n}`, a
//! formal root of a fundamental-group element considered up to conjugacy.
//!
//! The crate provides:
//! - exact word algebra for a free group with formal rational exponents
//!   ([`word`]);
//! - coherent labelings of the universal cover and lifted-path algebra
//!   ([`graph`]);
//! - vertex maps, their lifts, and iterated edge images ([`vmap`]);
//! - structural guarantees that force families of periodic rotation elements
//!   from how an edge's endpoint dynamics interact ([`detector`]);
//! - an exact piecewise-affine oracle that enumerates the periodic points on
//!   an edge, used to cross-check every guarantee ([`oracle`]);
//! - a line-oriented input format ([`spec_file`]), DOT rendering of balls in
//!   the cover ([`dot`]), and the command-line interface ([`cli`]).

pub mod cli;
pub mod detector;
pub mod dot;
pub mod graph;
pub mod oracle;
pub mod spec_file;
pub mod vmap;
pub mod word;

#[cfg(test)]
pub(crate) mod testutil;
