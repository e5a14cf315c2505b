//! Correlation clustering on signed complete graphs with same-cluster queries.
//!
//! The crate provides the query-driven pivot algorithms ([`algorithms`]), the
//! oracles they consult ([`oracle`]), an exact solver used both as an optimal
//! oracle and as a referee ([`exact`]), synthetic instance generation and file
//! formats ([`datagen`]), and the experiment harness behind the `ccq` binary
//! ([`experiment`], [`cli`]).

mod bitset;

pub mod algorithms;
pub mod cli;
pub mod datagen;
pub mod exact;
pub mod experiment;
pub mod graph;
pub mod oracle;
pub mod rng;

pub use bitset::BitSet;
pub use graph::{
    count_disagreements, Clustering, GraphError, Sign, SignedGraph, Triangle, TriangleShape, Vertex,
};
