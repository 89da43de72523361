//! TOML experiment configuration.
//!
//! ```toml
//! [graph]
//! edges = "data/g.edges"
//! attributes = "data/g.attrs"   # omit when [labeling] is given
//!
//! [labeling]                    # attraction-model labels on the full graph
//! p = 0.3
//! tau = 0.25
//!
//! [split]
//! alpha = 0.2
//! depth = 1
//!
//! [sampling]
//! subsamples = 50
//! subsample_size = 2000
//!
//! [seeds]
//! master = 7
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every other section (`[signature]`, `[forest]`, `[smote]`, `[stats]`,
//! `[runtime]`) is optional and falls back to the defaults below.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::LabelingParams;
use crate::learner::{ForestConfig, SmoteConfig};
use crate::sampler::SamplePlan;
use crate::seed;
use crate::signature::SignatureConfig;
use crate::split::SplitConfig;
use crate::stats::TTestKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSource {
    pub edges: PathBuf,
    pub attributes: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingSection {
    pub p: f64,
    pub tau: f64,
    pub max_iters: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub alpha: f64,
    pub depth: u32,
}

impl Default for SplitSection {
    fn default() -> Self {
        let d = SplitConfig::default();
        SplitSection {
            alpha: d.alpha,
            depth: d.depth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    pub subsamples: usize,
    pub subsample_size: usize,
    pub negative_cap: Option<u64>,
}

impl Default for SamplingSection {
    fn default() -> Self {
        SamplingSection {
            subsamples: 50,
            subsample_size: 2000,
            negative_cap: SamplePlan::default().negative_cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestSection {
    pub n_trees: usize,
    pub max_features: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestSection {
    fn default() -> Self {
        let d = ForestConfig::default();
        ForestSection {
            n_trees: d.n_trees,
            max_features: d.max_features,
            min_leaf: d.min_leaf,
            max_depth: d.max_depth,
            bootstrap: d.bootstrap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StatsSection {
    pub test: TTestKind,
    /// Grid points per KDE curve.
    pub kde_points: usize,
    /// Mean importance a feature needs to enter the filtered table.
    pub importance_floor: f64,
}

impl Default for StatsSection {
    fn default() -> Self {
        StatsSection {
            test: TTestKind::Paired,
            kde_points: 200,
            importance_floor: 0.01,
        }
    }
}

/// Stage seeds. Unset stages derive theirs from `master`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeedSection {
    pub master: Option<u64>,
    pub labeling: Option<u64>,
    pub split: Option<u64>,
    pub sampling: Option<u64>,
    pub learner: Option<u64>,
    pub metrics: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSeeds {
    pub labeling: u64,
    pub split: u64,
    pub sampling: u64,
    pub learner: u64,
    pub metrics: u64,
}

impl SeedSection {
    pub fn resolve(&self) -> Result<StageSeeds> {
        let stage = |own: Option<u64>, tag: &str| -> Result<u64> {
            own.or_else(|| self.master.map(|m| seed::derive_tag(m, tag)))
                .ok_or_else(|| Error::Config(format!("no seed for stage {tag}: set seeds.master or seeds.{tag}")))
        };
        Ok(StageSeeds {
            labeling: stage(self.labeling, "labeling")?,
            split: stage(self.split, "split")?,
            sampling: stage(self.sampling, "sampling")?,
            learner: stage(self.learner, "learner")?,
            metrics: stage(self.metrics, "metrics")?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RuntimeSection {
    /// Worker threads; `None` uses one per core.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Absent when the graph is handed over in memory.
    pub graph: Option<GraphSource>,
    pub labeling: Option<LabelingSection>,
    #[serde(default)]
    pub split: SplitSection,
    #[serde(default)]
    pub signature: SignatureConfig,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub forest: ForestSection,
    #[serde(default)]
    pub smote: SmoteConfig,
    #[serde(default)]
    pub stats: StatsSection,
    #[serde(default)]
    pub seeds: SeedSection,
    #[serde(default, skip_serializing)]
    pub output: OutputSection,
    #[serde(default)]
    pub runtime: RuntimeSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Relative graph paths are resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(g), Some(base)) = (cfg.graph.as_mut(), path.parent()) {
            g.edges = base.join(&g.edges);
            if let Some(a) = g.attributes.as_mut() {
                *a = base.join(&*a);
            }
        }
        Ok(cfg)
    }

    /// Echo for reports; leaves out the output directory.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.graph {
            if g.attributes.is_some() && self.labeling.is_some() {
                return Err(Error::Config(
                    "graph.attributes and [labeling] are mutually exclusive".into(),
                ));
            }
        }
        if let Some(l) = self.labeling_params(0) {
            l.validate()?;
        }
        if !(self.split.alpha > 0.0 && self.split.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1), got {}", self.split.alpha)));
        }
        if self.split.depth == 0 {
            return Err(Error::invalid("split depth must be at least 1"));
        }
        self.signature.validate()?;
        self.sample_plan(0).validate()?;
        if self.forest.n_trees == 0 || self.forest.min_leaf == 0 {
            return Err(Error::invalid("forest needs n_trees and min_leaf of at least 1"));
        }
        if self.smote.k_neighbors == 0 {
            return Err(Error::invalid("k_neighbors must be at least 1"));
        }
        if self.stats.kde_points < 2 {
            return Err(Error::invalid("kde_points must be at least 2"));
        }
        if !(0.0..=1.0).contains(&self.stats.importance_floor) {
            return Err(Error::invalid("importance_floor must lie in [0, 1]"));
        }
        if self.runtime.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        self.seeds.resolve()?;
        Ok(())
    }

    pub fn labeling_params(&self, seed: u64) -> Option<LabelingParams> {
        self.labeling.map(|l| LabelingParams {
            p: l.p,
            tau: l.tau,
            seed,
            max_iters: l.max_iters,
        })
    }

    pub fn split_config(&self, seed: u64) -> SplitConfig {
        SplitConfig {
            alpha: self.split.alpha,
            seed,
            depth: self.split.depth,
        }
    }

    pub fn sample_plan(&self, seed: u64) -> SamplePlan {
        SamplePlan {
            subsamples: self.sampling.subsamples,
            subsample_size: self.sampling.subsample_size,
            seed,
            negative_cap: self.sampling.negative_cap,
        }
    }

    pub fn forest_config(&self) -> ForestConfig {
        ForestConfig {
            n_trees: self.forest.n_trees,
            max_features: self.forest.max_features,
            min_leaf: self.forest.min_leaf,
            max_depth: self.forest.max_depth,
            bootstrap: self.forest.bootstrap,
            seed: 0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[graph]
edges = "g.edges"

[labeling]
p = 0.3
tau = 0.25

[split]
alpha = 0.3

[sampling]
subsamples = 4
subsample_size = 100

[stats]
test = "welch"

[seeds]
master = 11
learner = 5

[output]
dir = "out"
"#;

    #[test]
    fn parse_and_defaults() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        c.validate().unwrap();
        assert_eq!(c.split.depth, 1);
        assert_eq!(c.signature, SignatureConfig::default());
        assert_eq!(c.forest.n_trees, 100);
        assert_eq!(c.stats.test, TTestKind::Welch);
        let s = c.seeds.resolve().unwrap();
        assert_eq!(s.learner, 5);
        assert_eq!(s.split, seed::derive_tag(11, "split"));
    }

    #[test]
    fn echo_drops_output_and_round_trips() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let echo = c.to_toml().unwrap();
        assert!(!echo.contains("out"));
        let back = ExperimentConfig::from_toml(&echo).unwrap();
        assert_eq!(back.labeling, c.labeling);
        assert_eq!(back.seeds, c.seeds);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("[split]\nalpa = 0.2").is_err());
        let no_seed = ExperimentConfig::default();
        assert!(matches!(no_seed.validate(), Err(Error::Config(_))));
        let both = SAMPLE.replace("edges = \"g.edges\"", "edges = \"g.edges\"\nattributes = \"g.attrs\"");
        assert!(ExperimentConfig::from_toml(&both).unwrap().validate().is_err());
        let bad_p = SAMPLE.replace("p = 0.3", "p = 1.5");
        assert!(ExperimentConfig::from_toml(&bad_p).unwrap().validate().is_err());
    }
}
