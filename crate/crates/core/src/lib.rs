//! Decremental approximate distance oracle for undirected unweighted
//! graphs.
//!
//! The oracle ingests a fixed node set with an edge set that only shrinks,
//! and answers point-to-point distance queries with bounded multiplicative
//! and additive error. Internally it layers seeded node samples, bounded
//! decremental BFS trees, three keyed heap families over through-sample
//! path lengths, degree-filtered shortest-path trees, and per-node pivot
//! tables; a brute-force verifier can re-check every structure against
//! plain BFS after any deletion.

#![forbid(unsafe_code)]

pub mod dist;
pub mod estree;
pub mod generators;
pub mod fault;
pub mod graph;
pub mod light;
pub mod oracle;
pub mod pivots;
pub mod provider;
mod qheap;
pub mod relay;
pub mod sampling;
pub mod verify;

pub use dist::{Dist, INF};
pub use graph::{DynamicGraph, NodeId};
