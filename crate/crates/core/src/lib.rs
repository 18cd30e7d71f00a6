//! Graph-combinatorial tests for semi-definiteness of symmetric zero-row-sum
//! matrices, with an application to phase-locked states of the Kuramoto model.
//!
//! A symmetric matrix `A` with zero row sums is negative semi-definite exactly
//! when the Laplacian `L = -A` of its Coates graph is positive semi-definite.
//! The crate evaluates this through principal minors (computed both by
//! elimination and as weighted sums over spanning forests), through the
//! zero-row-sum version of Sylvester's criterion, and through structural
//! obstructions in the Coates graph: missing positive spanning trees,
//! negative cuts and over-weighted negative edges on induced lines.
//!
//! Vertex indices are 0-based throughout the library API. The text formats
//! in [`io`] and the serialized reports use 1-based labels.

pub mod analysis;
pub mod error;
pub mod graph;
pub mod io;
pub mod kuramoto;
pub mod matrix;
pub mod minors;
pub mod structure;
pub mod sylvester;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeSubset, OrientedIncidence, WeightedGraph};
pub use matrix::{SymmetricMatrix, Tolerances};
