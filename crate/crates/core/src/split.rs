//! Sanitized/auxiliary graph pairs with a controlled node overlap.
//!
//! The overlap `V_α` is the first `k = round(α·N)` nodes of a breadth-first
//! traversal rooted at the highest-degree node (BFS-HD). With `V1 ∪ V2 = V`
//! this makes the Jaccard coefficient of the two node sets exactly `k / N`.
//! The remaining nodes are shuffled and halved between the two sides; the
//! seed only affects that halving, never the overlap.

use std::collections::VecDeque;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, IdStyle, NodeId};
use crate::seed;

/// Smallest graph `recursive_split` will split or emit.
pub const LEAF_FLOOR: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub alpha: f64,
    pub seed: u64,
    pub depth: u32,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            alpha: 0.2,
            seed: 0,
            depth: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OverlapSplit {
    /// Sanitized graph `G1`.
    pub san: Graph,
    /// Auxiliary graph `G2`.
    pub aux: Graph,
    /// `V_α` as ids of the graph that was split, in BFS order.
    pub overlap: Vec<NodeId>,
    /// Parent-graph id of every sanitized node.
    pub san_origin: Vec<NodeId>,
    /// Parent-graph id of every auxiliary node.
    pub aux_origin: Vec<NodeId>,
    /// `(san_id, aux_id)` for every overlap node, sorted by `san_id`.
    pub identity: Vec<(NodeId, NodeId)>,
    pub lineage: String,
}

/// BFS order from the highest-degree node (smallest id on ties), visiting
/// neighbours in ascending id order.
pub fn bfs_hd_order(graph: &Graph) -> Vec<NodeId> {
    let n = graph.node_count();
    let Some(root) = (0..n).max_by_key(|&u| (graph.degree(u), std::cmp::Reverse(u))) else {
        return Vec::new();
    };
    let mut seen = vec![false; n];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    seen[root] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in graph.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    order
}

pub fn overlap_size(alpha: f64, n: usize) -> Result<usize> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let k = (alpha * n as f64).round() as usize;
    if k == 0 {
        return Err(Error::invalid(format!(
            "alpha {alpha} leaves no overlap on {n} nodes"
        )));
    }
    Ok(k)
}

pub fn bfs_hd_overlap_split(graph: &Graph, config: &SplitConfig) -> Result<OverlapSplit> {
    split_with_seed(graph, config.alpha, config.seed, "root".to_string())
}

fn split_with_seed(graph: &Graph, alpha: f64, seed: u64, lineage: String) -> Result<OverlapSplit> {
    let n = graph.node_count();
    let k = overlap_size(alpha, n)?;
    let order = bfs_hd_order(graph);
    if order.len() < k {
        return Err(Error::ComponentTooSmall {
            reached: order.len(),
            needed: k,
        });
    }
    let overlap = order[..k].to_vec();

    let mut in_overlap = vec![false; n];
    for &u in &overlap {
        in_overlap[u] = true;
    }
    let mut rest: Vec<NodeId> = (0..n).filter(|&u| !in_overlap[u]).collect();
    rest.shuffle(&mut seed::rng(seed));
    let half = rest.len() / 2;

    let side = |exclusive: &[NodeId]| {
        let mut nodes: Vec<NodeId> = overlap.iter().chain(exclusive).copied().collect();
        nodes.sort_unstable();
        nodes
    };
    let san_origin = side(&rest[..half]);
    let aux_origin = side(&rest[half..]);

    let mut identity: Vec<(NodeId, NodeId)> = overlap
        .iter()
        .map(|o| {
            (
                san_origin.binary_search(o).expect("overlap in san"),
                aux_origin.binary_search(o).expect("overlap in aux"),
            )
        })
        .collect();
    identity.sort_unstable();

    Ok(OverlapSplit {
        san: graph.induced_subgraph(&san_origin),
        aux: graph.induced_subgraph(&aux_origin),
        overlap,
        san_origin,
        aux_origin,
        identity,
        lineage,
    })
}

/// Splits `depth` times, re-splitting both sides of every split at each
/// level, and returns the `2^(depth-1)` splits of the last level.
pub fn recursive_split(graph: &Graph, config: &SplitConfig) -> Result<Vec<OverlapSplit>> {
    if config.depth == 0 {
        return Err(Error::invalid("recursion depth must be at least 1"));
    }
    let floor_check = |lineage: &str, g: &Graph| {
        if g.node_count() < LEAF_FLOOR {
            Err(Error::LeafTooSmall {
                lineage: lineage.to_string(),
                nodes: g.node_count(),
                floor: LEAF_FLOOR,
            })
        } else {
            Ok(())
        }
    };
    floor_check("root", graph)?;
    let mut splits = vec![bfs_hd_overlap_split(graph, config)?];
    for _ in 1..config.depth {
        let mut next = Vec::with_capacity(splits.len() * 2);
        for s in &splits {
            for (name, g) in [("san", &s.san), ("aux", &s.aux)] {
                let lineage = format!("{}/{name}", s.lineage);
                floor_check(&lineage, g)?;
                let child_seed = seed::derive_tag(config.seed, &lineage);
                next.push(split_with_seed(g, config.alpha, child_seed, lineage)?);
            }
        }
        splits = next;
    }
    for s in &splits {
        floor_check(&format!("{}/san", s.lineage), &s.san)?;
        floor_check(&format!("{}/aux", s.lineage), &s.aux)?;
    }
    Ok(splits)
}

/// `|V1 ∩ V2| / |V1 ∪ V2|`, recomputed from the two node sets.
pub fn jaccard_overlap(split: &OverlapSplit) -> f64 {
    let (a, b) = (&split.san_origin, &split.aux_origin);
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

impl OverlapSplit {
    /// Writes `san.edges`, `aux.edges` (dense ids), `identity.csv`
    /// (`san_id,aux_id`), the two node maps and, when labeled, the two
    /// attribute files.
    pub fn export(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let create = |name: &str| {
            let path = dir.join(name);
            File::create(&path)
                .map(BufWriter::new)
                .map_err(|e| Error::io(path, e))
        };
        let io = |name: &str| {
            let path = dir.join(name);
            move |e| Error::io(path, e)
        };
        self.san
            .write_edge_list(create("san.edges")?, IdStyle::Dense)
            .map_err(io("san.edges"))?;
        self.aux
            .write_edge_list(create("aux.edges")?, IdStyle::Dense)
            .map_err(io("aux.edges"))?;
        self.san.write_id_map(create("san_ids.csv")?).map_err(io("san_ids.csv"))?;
        self.aux.write_id_map(create("aux_ids.csv")?).map_err(io("aux_ids.csv"))?;
        let mut w = create("identity.csv")?;
        writeln!(w, "san_id,aux_id").map_err(io("identity.csv"))?;
        for (s, a) in &self.identity {
            writeln!(w, "{s},{a}").map_err(io("identity.csv"))?;
        }
        w.flush().map_err(io("identity.csv"))?;
        if self.san.is_labeled() {
            self.san.write_attributes(create("san.attrs")?, IdStyle::Dense)?;
            self.aux.write_attributes(create("aux.attrs")?, IdStyle::Dense)?;
        }
        Ok(())
    }
}
