//! Exact and sampled analysis of Markov chains on the two marginals of the
//! uniform distribution over consistent (vertex subset, edge subset) pairs
//! of a bipartite graph, with a focus on the counterexample family `G_n`.
//!
//! Modules:
//! - [`gf2`]: dense bit-packed linear algebra over GF(2).
//! - [`graphs`]: bipartite graphs, `G_n` and a plain-text format.
//! - [`semantics`]: the consistency relation, exact marginals and samplers.
//! - [`chains`]: the single-site, bond-flip and SW-style kernels.
//! - [`analysis`]: mixing times, cuts, conductance and experiments.

pub mod analysis;
pub mod chains;
pub mod error;
pub mod gf2;
pub mod graphs;
pub mod report;
pub mod rng;
pub mod semantics;
pub mod stats;

pub use error::{Error, Result};
pub use gf2::{GF2Matrix, GF2Vector};
pub use graphs::{BipartiteGraph, CounterexampleGraph};
pub use semantics::{EdgeSubset, EnumerationLimits, ExactDistribution, VertexSubset};
pub use num_rational::BigRational;
