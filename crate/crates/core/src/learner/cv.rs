use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::forest::normalize;
use super::{f1_score, gini_importance, smote_oversample, train_forest, Dataset, ForestConfig, SmoteConfig};
use crate::error::{Error, Result};
use crate::seed;

pub const REPETITIONS: usize = 5;
/// Rows each class needs for stratified halving.
pub const MIN_ROWS_PER_CLASS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    /// Ten scores, repetition-major: `[r0 A→B, r0 B→A, r1 A→B, ...]`.
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    /// Mean decrease in impurity averaged over the ten forests, summing to 1.
    pub importances: Vec<f64>,
    pub importance_defined: bool,
}

/// One repetition's two disjoint halves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSplit {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

/// Five seeded stratified 50/50 halvings of the rows. Each class is
/// shuffled and split separately; with an odd class count the second half
/// gets the extra row.
pub fn five_by_two_folds(labels: &[u8], seed: u64) -> Vec<FoldSplit> {
    let classes: [Vec<usize>; 2] = [0u8, 1].map(|c| (0..labels.len()).filter(|&i| labels[i] == c).collect());
    (0..REPETITIONS)
        .map(|r| {
            let mut rng = seed::rng(seed::derive(seed, r as u64));
            let mut split = FoldSplit {
                first: Vec::new(),
                second: Vec::new(),
            };
            for class in &classes {
                let mut rows = class.clone();
                rows.shuffle(&mut rng);
                let half = rows.len() / 2;
                split.first.extend_from_slice(&rows[..half]);
                split.second.extend_from_slice(&rows[half..]);
            }
            split.first.sort_unstable();
            split.second.sort_unstable();
            split
        })
        .collect()
}

/// 5×2 cross-validation. SMOTE only ever touches the training half.
/// Fold assignment depends on the labels and `seed` alone, so two feature
/// sets over the same rows and seed share identical folds.
pub fn cross_validate_5x2(
    data: &Dataset,
    forest: &ForestConfig,
    smote: &SmoteConfig,
    seed: u64,
) -> Result<CvResult> {
    for (class, &rows) in data.class_counts().iter().enumerate() {
        if rows < MIN_ROWS_PER_CLASS {
            return Err(Error::TooFewRows {
                class: class as u8,
                rows,
                needed: MIN_ROWS_PER_CLASS,
            });
        }
    }
    let mut fold_f1 = Vec::with_capacity(2 * REPETITIONS);
    let mut importance = vec![0.0; data.n_features()];
    for (r, split) in five_by_two_folds(data.labels(), seed::derive(seed, 0)).iter().enumerate() {
        for (f, (train, test)) in [(&split.first, &split.second), (&split.second, &split.first)]
            .into_iter()
            .enumerate()
        {
            let fold = (2 * r + f) as u64;
            let train = smote_oversample(&data.subset(train), smote, seed::derive(seed, 100 + fold))?;
            let model = train_forest(
                &train,
                &ForestConfig {
                    seed: seed::derive(seed, 200 + fold),
                    ..*forest
                },
            )?;
            let test = data.subset(test);
            fold_f1.push(f1_score(&model.predict_labels(&test)?, test.labels()));
            let imp = gini_importance(&model);
            if imp.defined {
                importance.iter_mut().zip(&imp.values).for_each(|(a, v)| *a += v);
            }
        }
    }
    let mean_f1 = fold_f1.iter().sum::<f64>() / fold_f1.len() as f64;
    let imp = normalize(importance);
    Ok(CvResult {
        fold_f1,
        mean_f1,
        importances: imp.values,
        importance_defined: imp.defined,
    })
}
