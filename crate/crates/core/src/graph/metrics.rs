//! Whole-graph summary statistics.

use std::collections::VecDeque;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::seed;

/// Node count above which [`AplMode::auto`] switches to sampling.
pub const EXACT_APL_LIMIT: usize = 5000;
pub const DEFAULT_APL_SOURCES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub density: f64,
    pub transitivity: f64,
    pub assortativity: Option<f64>,
    pub avg_path_length: Option<f64>,
    pub exact_apl: bool,
    pub disconnected_fraction: f64,
}

impl GraphMetrics {
    pub fn compute(graph: &Graph, apl: AplMode) -> Result<GraphMetrics> {
        let paths = average_path_length(graph, apl)?;
        Ok(GraphMetrics {
            density: density(graph)?,
            transitivity: transitivity(graph),
            assortativity: degree_assortativity(graph)?,
            avg_path_length: paths.mean,
            exact_apl: paths.exact,
            disconnected_fraction: paths.disconnected_fraction,
        })
    }
}

/// `2E / (N(N-1))`.
pub fn density(graph: &Graph) -> Result<f64> {
    let n = graph.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, found: n });
    }
    Ok(2.0 * graph.edge_count() as f64 / (n as f64 * (n - 1) as f64))
}

pub fn triangle_count(graph: &Graph) -> u64 {
    let mut total = 0u64;
    for u in 0..graph.node_count() {
        let nu = graph.neighbors(u);
        for &v in nu.iter().filter(|&&v| v > u) {
            // common neighbours w > v, merged over the two sorted lists
            let nv = graph.neighbors(v);
            let (mut i, mut j) = (0, 0);
            while i < nu.len() && j < nv.len() {
                match nu[i].cmp(&nv[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        if nu[i] > v {
                            total += 1;
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
    }
    total
}

/// Global clustering: `3 * triangles / connected triples`, 0 without triples.
pub fn transitivity(graph: &Graph) -> f64 {
    let triples: u64 = (0..graph.node_count())
        .map(|u| {
            let d = graph.degree(u) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    if triples == 0 {
        return 0.0;
    }
    3.0 * triangle_count(graph) as f64 / triples as f64
}

/// Pearson correlation of endpoint degrees, each edge counted in both
/// orientations. `None` when the degree variance over edge ends is zero.
pub fn degree_assortativity(graph: &Graph) -> Result<Option<f64>> {
    let e = graph.edge_count();
    if e == 0 {
        return Err(Error::NoEdges);
    }
    let deg = |u: NodeId| graph.degree(u) as f64;
    let mean = graph.edges().map(|(u, v)| deg(u) + deg(v)).sum::<f64>() / (2 * e) as f64;
    let (mut cov, mut var) = (0.0, 0.0);
    for (u, v) in graph.edges() {
        let (a, b) = (deg(u) - mean, deg(v) - mean);
        cov += 2.0 * a * b;
        var += a * a + b * b;
    }
    if var == 0.0 {
        return Ok(None);
    }
    Ok(Some((cov / var).clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AplMode {
    Exact,
    Sampled { sources: usize, seed: u64 },
}

impl AplMode {
    /// Exact up to [`EXACT_APL_LIMIT`] nodes, otherwise 1000 sampled sources.
    pub fn auto(n: usize, seed: u64) -> AplMode {
        if n > EXACT_APL_LIMIT {
            AplMode::Sampled {
                sources: DEFAULT_APL_SOURCES,
                seed,
            }
        } else {
            AplMode::Exact
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLengthSummary {
    /// Mean hop distance over connected ordered pairs; `None` if there are none.
    pub mean: Option<f64>,
    pub exact: bool,
    pub sources: usize,
    pub connected_pairs: u64,
    /// Share of ordered (source, target) pairs with no path.
    pub disconnected_fraction: f64,
}

fn bfs_sums(graph: &Graph, src: NodeId, dist: &mut [u32], queue: &mut VecDeque<NodeId>) -> (u64, u64) {
    dist.iter_mut().for_each(|d| *d = u32::MAX);
    dist[src] = 0;
    queue.clear();
    queue.push_back(src);
    let (mut sum, mut reached) = (0u64, 0u64);
    while let Some(u) = queue.pop_front() {
        let du = dist[u];
        for &v in graph.neighbors(u) {
            if dist[v] == u32::MAX {
                dist[v] = du + 1;
                sum += (du + 1) as u64;
                reached += 1;
                queue.push_back(v);
            }
        }
    }
    (sum, reached)
}

pub fn average_path_length(graph: &Graph, mode: AplMode) -> Result<PathLengthSummary> {
    let n = graph.node_count();
    if n == 0 {
        return Err(Error::TooFewNodes { needed: 1, found: 0 });
    }
    let (sources, exact): (Vec<NodeId>, bool) = match mode {
        AplMode::Exact => ((0..n).collect(), true),
        AplMode::Sampled { sources, seed } => {
            if sources > n {
                return Err(Error::invalid(format!(
                    "{sources} BFS sources requested on a graph of {n} nodes"
                )));
            }
            if sources == 0 {
                return Err(Error::invalid("need at least one BFS source"));
            }
            let mut rng = seed::rng(seed);
            let mut picked = index::sample(&mut rng, n, sources).into_vec();
            picked.sort_unstable();
            (picked, false)
        }
    };
    let (sum, reached) = sources
        .par_iter()
        .map_init(
            || (vec![u32::MAX; n], VecDeque::new()),
            |(dist, queue), &s| bfs_sums(graph, s, dist, queue),
        )
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let possible = sources.len() as u64 * (n as u64 - 1);
    Ok(PathLengthSummary {
        mean: (reached > 0).then(|| sum as f64 / reached as f64),
        exact,
        sources: sources.len(),
        connected_pairs: reached,
        disconnected_fraction: if possible == 0 {
            0.0
        } else {
            (possible - reached) as f64 / possible as f64
        },
    })
}
