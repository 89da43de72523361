//! Small seeded graph generators for experiments and tests.

use rand::Rng;

use crate::graph::{Graph, NodeId};
use crate::seed;

fn finish(n: usize, edges: Vec<(NodeId, NodeId)>) -> Graph {
    Graph::from_edges(n, edges)
        .expect("generated ids are in range")
        .0
}

/// Uniform random graph with `n` nodes and `m` distinct edges.
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let max = n * n.saturating_sub(1) / 2;
    assert!(m <= max, "{m} edges do not fit on {n} nodes");
    let mut rng = seed::rng(seed);
    let mut seen = std::collections::HashSet::with_capacity(m);
    while seen.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            seen.insert((u.min(v), u.max(v)));
        }
    }
    let mut edges: Vec<_> = seen.into_iter().collect();
    edges.sort_unstable();
    finish(n, edges)
}

/// Preferential attachment: each new node links to `m` existing nodes chosen
/// proportionally to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    assert!(m >= 1 && n > m);
    let mut rng = seed::rng(seed);
    let mut edges = Vec::new();
    let mut ends: Vec<NodeId> = Vec::new();
    for u in 0..=m {
        for v in 0..u {
            edges.push((v, u));
            ends.extend([u, v]);
        }
    }
    for u in (m + 1)..n {
        let mut targets: Vec<NodeId> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = ends[rng.gen_range(0..ends.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, u));
            ends.extend([u, t]);
        }
    }
    finish(n, edges)
}

/// Blocks of the given sizes; node pairs inside a block link with
/// probability `p_in`, across blocks with `p_out`.
pub fn planted_partition(sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Graph {
    let mut rng = seed::rng(seed);
    let block: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = block.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    finish(n, edges)
}

/// Ring where each node links to its `k` nearest neighbours on each side.
pub fn ring_lattice(n: usize, k: usize) -> Graph {
    assert!(n > 2 * k);
    let edges = (0..n)
        .flat_map(|u| (1..=k).map(move |d| (u, (u + d) % n)))
        .collect();
    finish(n, edges)
}

pub fn cycle(n: usize) -> Graph {
    ring_lattice(n, 1)
}

/// Two cliques of `size` nodes; node `i` of the first joins node `i` of the
/// second for `i < bridges`.
pub fn two_cliques(size: usize, bridges: usize) -> Graph {
    let mut edges = Vec::new();
    for base in [0, size] {
        for u in 0..size {
            for v in (u + 1)..size {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.extend((0..bridges.min(size)).map(|i| (i, size + i)));
    finish(2 * size, edges)
}
