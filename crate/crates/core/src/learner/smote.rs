use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SmoteConfig {
    pub k_neighbors: usize,
}

impl Default for SmoteConfig {
    fn default() -> Self {
        SmoteConfig { k_neighbors: 5 }
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Balances the classes by appending synthetic minority rows
/// `x + λ·(x_nn − x)`, `λ ~ U[0, 1)`, where `x_nn` is one of the
/// `k_neighbors` Euclidean nearest minority rows of `x`. Base rows are taken
/// round-robin over a shuffled minority order. Original rows come first and
/// are unchanged.
pub fn smote_oversample(data: &Dataset, config: &SmoteConfig, seed: u64) -> Result<Dataset> {
    if config.k_neighbors == 0 {
        return Err(Error::invalid("k_neighbors must be at least 1"));
    }
    let [neg, pos] = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    if neg == pos {
        return Ok(data.clone());
    }
    let minority_label = (pos < neg) as u8;
    let minority: Vec<usize> = (0..data.len()).filter(|&i| data.label(i) == minority_label).collect();
    let m = minority.len();
    if m < 2 {
        return Err(Error::MinorityTooSmall(m));
    }
    let k = config.k_neighbors.min(m - 1);

    let neighbours: Vec<Vec<usize>> = minority
        .iter()
        .map(|&i| {
            let mut d: Vec<(f64, usize)> = minority
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| (squared_distance(data.row(i), data.row(j)), j))
                .collect();
            d.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            d.into_iter().take(k).map(|(_, j)| j).collect()
        })
        .collect();

    let mut rng = seed::rng(seed);
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let needed = neg.max(pos) - m;
    let mut out = data.clone();
    let width = data.n_features();
    for s in 0..needed {
        let base_pos = order[s % m];
        let base = data.row(minority[base_pos]);
        let nn = data.row(neighbours[base_pos][rng.gen_range(0..k)]);
        let lambda: f64 = rng.gen();
        let values = out.values_mut();
        values.reserve(width);
        values.extend(base.iter().zip(nn).map(|(x, y)| x + lambda * (y - x)));
        out.push_label(minority_label);
    }
    Ok(out)
}
