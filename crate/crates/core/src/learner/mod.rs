//! Pair classifier: SMOTE oversampling, a CART/Gini random forest, 5×2
//! cross-validation and F1 scoring.

mod cv;
mod forest;
mod smote;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cv::{cross_validate_5x2, five_by_two_folds, CvResult, FoldSplit};
pub use forest::{gini_importance, train_forest, ForestConfig, Importances, Prediction, RandomForest};
pub use smote::{smote_oversample, SmoteConfig};
pub use tree::DecisionTree;

/// Dense row-major feature matrix with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    n_features: usize,
    values: Vec<f64>,
    labels: Vec<u8>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn new(feature_names: Vec<String>) -> Self {
        Dataset {
            n_features: feature_names.len(),
            values: Vec::new(),
            labels: Vec::new(),
            feature_names,
        }
    }

    /// Unnamed features `f0, f1, ...`.
    pub fn with_width(n_features: usize) -> Self {
        Self::new((0..n_features).map(|i| format!("f{i}")).collect())
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: &[u8]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        let mut d = Self::with_width(width);
        for (r, &l) in rows.iter().zip(labels) {
            d.push(r, l)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, row: &[f64], label: u8) -> Result<()> {
        if row.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: row.len(),
            });
        }
        if label > 1 {
            return Err(Error::invalid(format!("label {label} is not binary")));
        }
        self.values.extend_from_slice(row);
        self.labels.push(label);
        Ok(())
    }

    /// Appends a row whose features were already written to the value buffer
    /// via [`Dataset::values_mut`].
    pub(crate) fn push_label(&mut self, label: u8) {
        debug_assert_eq!(self.values.len(), (self.labels.len() + 1) * self.n_features);
        self.labels.push(label);
    }

    pub(crate) fn values_mut(&mut self) -> &mut Vec<f64> {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_features..(i + 1) * self.n_features]
    }

    #[inline]
    pub fn value(&self, i: usize, f: usize) -> f64 {
        self.values[i * self.n_features + f]
    }

    pub fn label(&self, i: usize) -> u8 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Row counts as `[class 0, class 1]`.
    pub fn class_counts(&self) -> [usize; 2] {
        let pos = self.labels.iter().filter(|&&l| l == 1).count();
        [self.labels.len() - pos, pos]
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        let mut d = Dataset::new(self.feature_names.clone());
        d.values.reserve(rows.len() * self.n_features);
        for &i in rows {
            d.values.extend_from_slice(self.row(i));
            d.labels.push(self.labels[i]);
        }
        d
    }
}

/// F1 of the positive class; 0 when precision and recall are both 0.
pub fn f1_score(predictions: &[u8], truth: &[u8]) -> f64 {
    assert_eq!(predictions.len(), truth.len(), "prediction/truth length mismatch");
    let (mut tp, mut fp, mut fneg) = (0u64, 0u64, 0u64);
    for (&p, &t) in predictions.iter().zip(truth) {
        match (p, t) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fneg += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fneg) as f64;
    2.0 * precision * recall / (precision + recall)
}
