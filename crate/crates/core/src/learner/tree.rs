//! CART classification tree with Gini impurity.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::seed;

const LEAF: u32 = u32::MAX;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Node {
    feature: u32,
    threshold: f64,
    left: u32,
    right: u32,
    /// Class-1 fraction of the training rows that reached this node.
    prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    /// Summed weighted impurity decrease per feature.
    importance: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_features: usize,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

/// `n·gini` for a node with `pos` positives out of `n`.
#[inline]
fn weighted_gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (p, q) = (pos as f64, (n - pos) as f64);
    2.0 * p * q / n as f64
}

struct Candidate {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        if self.impurity < other.impurity - TIE_EPS {
            return true;
        }
        if self.impurity > other.impurity + TIE_EPS {
            return false;
        }
        (self.feature, self.threshold) < (other.feature, other.threshold)
    }
}

/// Column-major copy of a dataset, with the features that vary at all.
pub(crate) struct Columns {
    values: Vec<f64>,
    labels: Vec<u8>,
    n_rows: usize,
    n_features: usize,
    varying: Vec<usize>,
}

impl Columns {
    pub(crate) fn new(data: &Dataset) -> Self {
        let (n_rows, n_features) = (data.len(), data.n_features());
        let mut values = Vec::with_capacity(n_rows * n_features);
        let mut varying = Vec::new();
        for f in 0..n_features {
            let start = values.len();
            values.extend((0..n_rows).map(|i| data.value(i, f)));
            let col = &values[start..];
            if col.iter().any(|&v| v != col[0]) {
                varying.push(f);
            }
        }
        Columns {
            values,
            labels: data.labels().to_vec(),
            n_rows,
            n_features,
            varying,
        }
    }

    #[inline]
    fn column(&self, f: usize) -> &[f64] {
        &self.values[f * self.n_rows..(f + 1) * self.n_rows]
    }
}

struct Builder<'a> {
    data: &'a Columns,
    params: TreeParams,
    rng: seed::Rng,
    nodes: Vec<Node>,
    importance: Vec<f64>,
    features: Vec<usize>,
    column: Vec<(f64, u8)>,
}

impl Builder<'_> {
    fn leaf(&mut self, pos: usize, n: usize) -> u32 {
        self.nodes.push(Node {
            feature: LEAF,
            threshold: 0.0,
            left: 0,
            right: 0,
            prob: pos as f64 / n as f64,
        });
        (self.nodes.len() - 1) as u32
    }

    /// Best threshold on one feature, if any split leaves `min_leaf` rows on
    /// both sides.
    fn scan(&mut self, rows: &[usize], feature: usize, total_pos: usize) -> Option<Candidate> {
        let values = self.data.column(feature);
        let labels = &self.data.labels;
        let first = values[rows[0]];
        if rows.iter().all(|&i| values[i] == first) {
            return None;
        }
        self.column.clear();
        self.column.extend(rows.iter().map(|&i| (values[i], labels[i])));
        let col = &mut self.column;
        col.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let n = col.len();
        let min_leaf = self.params.min_leaf;
        let mut best: Option<Candidate> = None;
        let mut left_pos = 0;
        for i in 0..n - 1 {
            left_pos += col[i].1 as usize;
            let left_n = i + 1;
            if col[i].0 == col[i + 1].0 || left_n < min_leaf || n - left_n < min_leaf {
                continue;
            }
            let impurity = weighted_gini(left_pos, left_n) + weighted_gini(total_pos - left_pos, n - left_n);
            if best.as_ref().is_none_or(|b| impurity < b.impurity - TIE_EPS) {
                best = Some(Candidate {
                    impurity,
                    feature,
                    threshold: (col[i].0 + col[i + 1].0) / 2.0,
                });
            }
        }
        best
    }

    fn grow(&mut self, rows: &mut [usize], depth: usize) -> u32 {
        let n = rows.len();
        let pos = rows.iter().filter(|&&i| self.data.labels[i] == 1).count();
        let stop = pos == 0
            || pos == n
            || n < 2 * self.params.min_leaf
            || self.params.max_depth.is_some_and(|d| depth >= d);
        if stop {
            return self.leaf(pos, n);
        }

        // Draw features without replacement until `max_features` of them
        // admit a split, or none are left. Features constant over the whole
        // training set never split and are left out of the pool.
        let total = self.features.len();
        let mut useful = 0;
        let mut best: Option<Candidate> = None;
        for k in 0..total {
            if useful >= self.params.max_features {
                break;
            }
            let j = self.rng.gen_range(k..total);
            self.features.swap(k, j);
            let f = self.features[k];
            if let Some(c) = self.scan(rows, f, pos) {
                useful += 1;
                if best.as_ref().is_none_or(|b| c.beats(b)) {
                    best = Some(c);
                }
            }
        }
        let Some(split) = best else {
            return self.leaf(pos, n);
        };

        self.importance[split.feature] += weighted_gini(pos, n) - split.impurity;
        let values = self.data.column(split.feature);
        let mut mid = 0;
        for k in 0..n {
            if values[rows[k]] <= split.threshold {
                rows.swap(k, mid);
                mid += 1;
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            feature: split.feature as u32,
            threshold: split.threshold,
            left: 0,
            right: 0,
            prob: pos as f64 / n as f64,
        });
        let (l, r) = rows.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id].left = left;
        self.nodes[id].right = right;
        id as u32
    }
}

impl DecisionTree {
    /// Grows a tree on the given row indices (repeats allowed).
    pub(crate) fn fit(data: &Columns, rows: &mut [usize], params: TreeParams, seed: u64) -> DecisionTree {
        assert!(!rows.is_empty(), "cannot grow a tree on zero rows");
        let mut b = Builder {
            data,
            params,
            rng: seed::rng(seed),
            nodes: Vec::new(),
            importance: vec![0.0; data.n_features],
            features: data.varying.clone(),
            column: Vec::with_capacity(rows.len()),
        };
        b.grow(rows, 0);
        DecisionTree {
            nodes: b.nodes,
            importance: b.importance,
        }
    }

    /// Class-1 probability of the leaf `x` falls into.
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut node = &self.nodes[0];
        while node.feature != LEAF {
            let next = if x[node.feature as usize] <= node.threshold {
                node.left
            } else {
                node.right
            };
            node = &self.nodes[next as usize];
        }
        node.prob
    }

    /// Feature and threshold of the root, `None` for a single leaf.
    pub fn root_split(&self) -> Option<(usize, f64)> {
        let root = &self.nodes[0];
        (root.feature != LEAF).then_some((root.feature as usize, root.threshold))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn split_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.feature != LEAF).count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            let n = &nodes[i];
            if n.feature == LEAF {
                0
            } else {
                1 + walk(nodes, n.left as usize).max(walk(nodes, n.right as usize))
            }
        }
        walk(&self.nodes, 0)
    }

    pub(crate) fn raw_importance(&self) -> &[f64] {
        &self.importance
    }
}
