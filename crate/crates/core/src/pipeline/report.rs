use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, StageSeeds};
use crate::error::{Error, Result};
use crate::graph::metrics::GraphMetrics;
use crate::labeling::{LabelingResult, ParamEstimate};
use crate::signature::FeatureMode;
use crate::stats::{KdeCurve, PairedScoreVectors, TTestResult};

pub const SCHEMA_VERSION: u32 = 1;

pub const REPORT_FILE: &str = "report.json";
pub const F1_FILE: &str = "f1_vectors.csv";
pub const IMPORTANCE_FULL_FILE: &str = "importance_full.csv";
pub const IMPORTANCE_FILTERED_FILE: &str = "importance_filtered.csv";
pub const GRID_FILE: &str = "grid.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub metrics: GraphMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingSummary {
    pub p: f64,
    pub tau: f64,
    pub target_delta: u64,
    pub achieved_cross_ties: u64,
    pub iterations: u64,
    pub accepted_swaps: u64,
    pub converged: bool,
}

impl LabelingSummary {
    pub fn new(p: f64, tau: f64, r: &LabelingResult) -> Self {
        LabelingSummary {
            p,
            tau,
            target_delta: r.target_delta,
            achieved_cross_ties: r.achieved_cross_ties,
            iterations: r.iterations,
            accepted_swaps: r.accepted_swaps,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub lineage: String,
    pub san_nodes: usize,
    pub aux_nodes: usize,
    pub overlap: usize,
    pub jaccard: f64,
    /// `|V_san × V_aux|`.
    pub population: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub mode: FeatureMode,
    pub feature: String,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeSummary {
    pub feature: String,
    /// Subsamples contributing an importance value.
    pub samples: usize,
    pub bandwidth: Option<f64>,
    /// Set instead of a curve when every sample has the same value.
    pub point_mass: Option<f64>,
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub seeds: StageSeeds,
    pub graph: GraphSummary,
    pub labeling: Option<LabelingSummary>,
    /// Attraction parameters read back from the labels that were attacked.
    pub attribute_estimate: Option<ParamEstimate>,
    pub splits: Vec<SplitSummary>,
    /// `|S|` summed over splits.
    pub population_size: u64,
    /// Lineage of the split behind each subsample.
    pub subsample_splits: Vec<String>,
    pub f1: PairedScoreVectors,
    pub gs_mean_f1: f64,
    pub gs_lbl_mean_f1: f64,
    pub t_test: Option<TTestResult>,
    /// Why `t_test` is missing.
    pub t_test_note: Option<String>,
    /// Features with mean importance at or above the floor.
    pub importances: Vec<ImportanceEntry>,
    pub omitted_features: Vec<ImportanceEntry>,
    pub kde: Vec<KdeSummary>,
    /// Wall-clock milliseconds per stage; the only nondeterministic field.
    pub timings_ms: BTreeMap<String, u64>,
    #[serde(skip)]
    pub kde_curves: Vec<(String, KdeCurve)>,
}

impl AttackReport {
    /// Filtered and omitted entries together, in feature order per mode.
    pub fn full_importances(&self) -> Vec<&ImportanceEntry> {
        let mut all: Vec<&ImportanceEntry> = self.importances.iter().chain(&self.omitted_features).collect();
        all.sort_by_key(|e| (e.mode == FeatureMode::GsLbl, self.feature_rank(e)));
        all
    }

    fn feature_rank(&self, e: &ImportanceEntry) -> usize {
        crate::signature::feature_names(self.config.signature, e.mode)
            .iter()
            .position(|n| n.to_string() == e.feature)
            .unwrap_or(usize::MAX)
    }

    pub fn t_statistic(&self) -> Option<f64> {
        self.t_test.map(|t| t.t_statistic)
    }
}

struct Out {
    dir: PathBuf,
}

impl Out {
    fn create(&self, name: &str) -> Result<(BufWriter<File>, PathBuf)> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok((BufWriter::new(f), path))
    }

    fn write(&self, name: &str, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<PathBuf> {
        let (mut w, path) = self.create(name)?;
        body(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}

fn write_importances<'a>(
    w: &mut impl Write,
    rows: impl IntoIterator<Item = &'a ImportanceEntry>,
) -> std::io::Result<()> {
    writeln!(w, "mode,feature,mean,std")?;
    for e in rows {
        writeln!(w, "{},{},{},{}", e.mode, e.feature, e.mean, e.std)?;
    }
    Ok(())
}

/// Writes `report.json`, `f1_vectors.csv`, `importance_full.csv`,
/// `importance_filtered.csv` and one `kde_<feature>.csv` per curve. Returns
/// the paths written.
pub fn emit_reports(report: &AttackReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let out = Out { dir: dir.to_path_buf() };
    let mut written = Vec::new();

    let json = serde_json::to_string_pretty(report).map_err(|e| Error::Config(e.to_string()))?;
    written.push(out.write(REPORT_FILE, |w| writeln!(w, "{json}"))?);

    written.push(out.write(F1_FILE, |w| {
        writeln!(w, "subsample,split,gs,gs_lbl")?;
        for (i, (g, l)) in report.f1.gs.iter().zip(&report.f1.gs_lbl).enumerate() {
            writeln!(w, "{i},{},{g},{l}", report.subsample_splits[i])?;
        }
        Ok(())
    })?);

    written.push(out.write(IMPORTANCE_FULL_FILE, |w| {
        write_importances(w, report.full_importances())
    })?);
    written.push(out.write(IMPORTANCE_FILTERED_FILE, |w| {
        write_importances(w, &report.importances)
    })?);

    for (feature, curve) in &report.kde_curves {
        written.push(out.write(&kde_file_name(feature), |w| curve.write_csv(w))?);
    }
    Ok(written)
}

pub fn kde_file_name(feature: &str) -> String {
    let safe: String = feature
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    format!("kde_{safe}.csv")
}
