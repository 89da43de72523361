use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{Columns, DecisionTree, TreeParams};
use super::Dataset;
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Candidate features per split; `None` means `⌈√F⌉`.
    pub max_features: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    /// Grow each tree on a bootstrap resample; otherwise on every row once.
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_features: None,
            min_leaf: 1,
            max_depth: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    fn resolve(&self, n_features: usize) -> Result<TreeParams> {
        if self.n_trees == 0 {
            return Err(Error::invalid("forest needs at least one tree"));
        }
        if self.min_leaf == 0 {
            return Err(Error::invalid("min_leaf must be at least 1"));
        }
        let max_features = self
            .max_features
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize);
        if max_features == 0 || max_features > n_features {
            return Err(Error::invalid(format!(
                "max_features {max_features} outside [1, {n_features}]"
            )));
        }
        Ok(TreeParams {
            max_features,
            min_leaf: self.min_leaf,
            max_depth: self.max_depth,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    n_features: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: u8,
    /// Mean class-1 leaf probability over trees.
    pub score: f64,
}

/// Bagged CART trees; tree `i` is grown from its own bootstrap resample and
/// RNG stream, so the forest is a pure function of data and seed.
pub fn train_forest(data: &Dataset, config: &ForestConfig) -> Result<RandomForest> {
    if data.len() < 2 {
        return Err(Error::invalid("forest needs at least two rows"));
    }
    let [neg, pos] = data.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    let params = config.resolve(data.n_features())?;
    let n = data.len();
    let columns = Columns::new(data);
    let trees = (0..config.n_trees)
        .into_par_iter()
        .map(|t| {
            let tree_seed = seed::derive(config.seed, t as u64);
            let mut rows: Vec<usize> = if config.bootstrap {
                let mut rng = seed::rng(seed::derive(tree_seed, 0));
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            DecisionTree::fit(&columns, &mut rows, params, seed::derive(tree_seed, 1))
        })
        .collect();
    Ok(RandomForest {
        trees,
        n_features: data.n_features(),
    })
}

impl RandomForest {
    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    /// Label is 1 when the score is at least 0.5.
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let score = self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64;
        Ok(Prediction {
            label: (score >= 0.5) as u8,
            score,
        })
    }

    pub fn predict_labels(&self, data: &Dataset) -> Result<Vec<u8>> {
        (0..data.len())
            .map(|i| self.predict(data.row(i)).map(|p| p.label))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Importances {
    pub values: Vec<f64>,
    /// False when no tree made a split; `values` is then all zero.
    pub defined: bool,
}

/// Mean decrease in impurity: each tree's decreases normalized to sum 1,
/// averaged over trees that split, renormalized.
pub fn gini_importance(forest: &RandomForest) -> Importances {
    let mut total = vec![0.0; forest.n_features];
    for tree in &forest.trees {
        let raw = tree.raw_importance();
        let sum: f64 = raw.iter().sum();
        if sum > 0.0 {
            total.iter_mut().zip(raw).for_each(|(t, r)| *t += r / sum);
        }
    }
    normalize(total)
}

pub(crate) fn normalize(mut values: Vec<f64>) -> Importances {
    let sum: f64 = values.iter().sum();
    if sum > 0.0 {
        values.iter_mut().for_each(|v| *v /= sum);
        Importances { values, defined: true }
    } else {
        Importances {
            values: vec![0.0; values.len()],
            defined: false,
        }
    }
}
