//! Benchmark toolkit for measuring how much a single binary node attribute
//! increases a graph's exposure to machine-learning node re-identification.
//!
//! The pipeline splits a labeled graph into a sanitized and an auxiliary
//! graph with a controlled node overlap, describes every node by binned
//! neighborhood degree and attribute distributions, trains random forests to
//! tell identical node pairs from non-identical ones, and compares the
//! topology-only attack (GS) with the topology-plus-attribute attack
//! (GS(LBL)) through a paired T-statistic.

pub mod error;
pub mod generate;
pub mod graph;
pub mod labeling;
pub mod learner;
pub mod pipeline;
pub mod sampler;
pub mod seed;
pub mod signature;
pub mod split;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{AttrValue, Graph, NodeId};
