//! Evaluate influence proxies for the spreading potential problem.
//!
//! The crate computes node-level influence measures on a social graph,
//! estimates the spread of node *sets* under a Monte Carlo Linear Threshold
//! model, and ranks the measures against the simulated reference with the
//! Sum of Ranking Differences (SRD) statistic, its permutation test (CRRN)
//! and a Wilcoxon-paired cross-validation.
//!
//! Module map:
//!
//! - [`graph`]: compact adjacency, edge-list loading, the five-town fixture.
//! - [`centrality`]: the seven measures behind the [`centrality::Measure`]
//!   trait, registered by name in a [`centrality::MeasureRegistry`].
//! - [`diffusion`]: the Linear Threshold engine.
//! - [`srd`]: fractional ranks, SRD, CRRN, cross-validation, Wilcoxon.
//! - [`experiment`]: the sampling pipeline and top-k external validation.

pub mod centrality;
pub mod diffusion;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod rng;
pub mod srd;

pub use error::{Error, Result};
pub use graph::{Graph, GroupedGraph, NodeId};
