//! Brute-force reference implementations shared by the integration tests.
//! Everything here works on a dense adjacency matrix and favours obviousness
//! over speed.
#![allow(dead_code)]

use labelleak::generate;
use labelleak::graph::AttrValue;
use labelleak::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn matrix(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

pub fn degrees(m: &[Vec<bool>]) -> Vec<usize> {
    m.iter().map(|row| row.iter().filter(|&&b| b).count()).collect()
}

pub fn density(m: &[Vec<bool>]) -> f64 {
    let n = m.len() as f64;
    let e = degrees(m).iter().sum::<usize>() as f64 / 2.0;
    e / (n * (n - 1.0) / 2.0)
}

/// Closed triplets over connected triplets, counting ordered wedges.
pub fn transitivity(m: &[Vec<bool>]) -> f64 {
    let n = m.len();
    let (mut closed, mut wedges) = (0u64, 0u64);
    for centre in 0..n {
        for a in 0..n {
            for b in 0..n {
                if a != b && a != centre && b != centre && m[centre][a] && m[centre][b] {
                    wedges += 1;
                    if m[a][b] {
                        closed += 1;
                    }
                }
            }
        }
    }
    if wedges == 0 {
        0.0
    } else {
        closed as f64 / wedges as f64
    }
}

/// Newman's closed form over the undirected edge list.
pub fn assortativity(m: &[Vec<bool>]) -> Option<f64> {
    let deg = degrees(m);
    let n = m.len();
    let (mut e, mut jk, mut half_sum, mut half_sq) = (0.0, 0.0, 0.0, 0.0);
    for u in 0..n {
        for v in u + 1..n {
            if m[u][v] {
                let (j, k) = (deg[u] as f64, deg[v] as f64);
                e += 1.0;
                jk += j * k;
                half_sum += 0.5 * (j + k);
                half_sq += 0.5 * (j * j + k * k);
            }
        }
    }
    let mean = half_sum / e;
    let den = half_sq / e - mean * mean;
    if den.abs() < 1e-12 {
        return None;
    }
    Some((jk / e - mean * mean) / den)
}

/// All-pairs hop distances (Floyd–Warshall); `u32::MAX` when unreachable.
pub fn distances(m: &[Vec<bool>]) -> Vec<Vec<u32>> {
    let n = m.len();
    let inf = u32::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for v in 0..n {
            if m[u][v] {
                d[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    for row in &mut d {
        for x in row.iter_mut() {
            if *x >= inf {
                *x = u32::MAX;
            }
        }
    }
    d
}

/// Mean distance over connected ordered pairs and the disconnected share.
pub fn average_path_length(m: &[Vec<bool>]) -> (Option<f64>, f64) {
    let d = distances(m);
    let n = m.len();
    let (mut sum, mut reached, mut total) = (0u64, 0u64, 0u64);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                total += 1;
                if d[i][j] != u32::MAX {
                    sum += d[i][j] as u64;
                    reached += 1;
                }
            }
        }
    }
    let mean = (reached > 0).then(|| sum as f64 / reached as f64);
    (mean, (total - reached) as f64 / total as f64)
}

pub fn cross_ties(m: &[Vec<bool>], labels: &[AttrValue]) -> u64 {
    let n = m.len();
    let mut c = 0;
    for u in 0..n {
        for v in u + 1..n {
            if m[u][v] && labels[u] != labels[v] {
                c += 1;
            }
        }
    }
    c
}

/// Nodes at exact distance `hop` from `u`.
pub fn ring(dist: &[Vec<u32>], u: usize, hop: u32) -> Vec<usize> {
    (0..dist.len()).filter(|&v| dist[u][v] == hop).collect()
}

/// `t = mean(d)·√n / sd(d)` with the variance from raw sums.
pub fn paired_t(gs: &[f64], lbl: &[f64]) -> f64 {
    let n = gs.len() as f64;
    let d: Vec<f64> = lbl.iter().zip(gs).map(|(a, b)| a - b).collect();
    let s: f64 = d.iter().sum();
    let s2: f64 = d.iter().map(|x| x * x).sum();
    let var = (s2 - s * s / n) / (n - 1.0);
    (s / n) * n.sqrt() / var.sqrt()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A G(n, m) graph with `n` in `[lo, hi]` and average degree near `avg`.
pub fn random_graph(seed: u64, lo: usize, hi: usize, avg: f64) -> Graph {
    let mut r = rng(seed);
    let n = r.gen_range(lo..=hi);
    let m = ((n as f64 * avg / 2.0) as usize).min(n * (n - 1) / 2);
    generate::gnm(n, m, seed)
}

pub fn random_labels(n: usize, seed: u64) -> Vec<AttrValue> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| if r.gen_bool(0.35) { AttrValue::B } else { AttrValue::R })
        .collect()
}
