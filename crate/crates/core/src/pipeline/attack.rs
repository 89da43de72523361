use std::collections::BTreeMap;
use std::time::Instant;

use log::info;
use rayon::prelude::*;

use super::config::{ExperimentConfig, StageSeeds};
use super::report::{
    kde_file_name, AttackReport, GraphSummary, ImportanceEntry, KdeSummary, LabelingSummary, SplitSummary,
    SCHEMA_VERSION,
};
use crate::error::{Error, Result, StageExt};
use crate::graph::metrics::{AplMode, GraphMetrics};
use crate::graph::{load_attributes, load_edge_list, Graph};
use crate::labeling::{assign_labels, estimate_params};
use crate::learner::{cross_validate_5x2, CvResult, Dataset};
use crate::sampler::{reservoir_subsamples, PairExample, PairPopulation};
use crate::seed;
use crate::signature::{append_pair_features, feature_names, FeatureMode, SignatureTable};
use crate::split::{jaccard_overlap, recursive_split, OverlapSplit};
use crate::stats::{gaussian_kde, t_statistic, PairedScoreVectors};

#[derive(Default)]
pub(crate) struct Timings(BTreeMap<String, u64>);

impl Timings {
    pub(crate) fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        info!("stage {stage}");
        let start = Instant::now();
        let out = f().stage(stage);
        *self.0.entry(stage.to_string()).or_default() += start.elapsed().as_millis() as u64;
        out
    }
}

/// Loads the configured graph and runs the full attack on it.
pub fn run_attack(config: &ExperimentConfig) -> Result<AttackReport> {
    config.validate()?;
    let mut timings = Timings::default();
    let graph = timings.time("load", || load_graph(config))?;
    run_attack_timed(&graph, config, None, timings)
}

/// Runs the attack on an in-memory graph; `config.graph` is ignored.
pub fn run_attack_on(graph: &Graph, config: &ExperimentConfig) -> Result<AttackReport> {
    config.validate()?;
    run_attack_timed(graph, config, None, Timings::default())
}

pub fn load_graph(config: &ExperimentConfig) -> Result<Graph> {
    let source = config
        .graph
        .as_ref()
        .ok_or_else(|| Error::Config("no [graph] section".into()))?;
    let (graph, _) = load_edge_list(&source.edges)?;
    match &source.attributes {
        Some(path) => load_attributes(graph, path),
        None => Ok(graph),
    }
}

pub(crate) fn topology_metrics(graph: &Graph, seeds: &StageSeeds, timings: &mut Timings) -> Result<GraphSummary> {
    let metrics = timings.time("metrics", || {
        GraphMetrics::compute(graph, AplMode::auto(graph.node_count(), seeds.metrics))
    })?;
    Ok(GraphSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        metrics,
    })
}

pub(crate) fn run_attack_timed(
    graph: &Graph,
    config: &ExperimentConfig,
    summary: Option<GraphSummary>,
    mut timings: Timings,
) -> Result<AttackReport> {
    let seeds = config.seeds.resolve()?;
    let summary = match summary {
        Some(s) => s,
        None => topology_metrics(graph, &seeds, &mut timings)?,
    };

    let mut labeling = None;
    let labeled = timings.time("labeling", || match config.labeling_params(seeds.labeling) {
        Some(params) => {
            params.validate()?;
            let r = assign_labels(graph, &params)?;
            labeling = Some(LabelingSummary::new(params.p, params.tau, &r));
            if !r.converged {
                return Err(Error::NotConverged(Box::new(r)));
            }
            graph.clone().with_attributes(r.assignment)
        }
        None if graph.is_labeled() => Ok(graph.clone()),
        None => Err(Error::Unlabeled),
    })?;
    let attribute_estimate = estimate_params(&labeled).ok();

    let splits = timings.time("split", || recursive_split(&labeled, &config.split_config(seeds.split)))?;

    let tables = timings.time("signatures", || {
        splits
            .iter()
            .map(|s| {
                Ok((
                    SignatureTable::build(&s.san, config.signature)?,
                    SignatureTable::build(&s.aux, config.signature)?,
                ))
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut split_summaries = Vec::with_capacity(splits.len());
    let samples = timings.time("sampling", || {
        draw_subsamples(&splits, config, seeds.sampling, &mut split_summaries)
    })?;

    let results = timings.time("learning", || {
        samples
            .par_iter()
            .enumerate()
            .map(|(i, (j, pairs))| {
                let (san, aux) = &tables[*j];
                let fold_seed = seed::derive(seeds.learner, i as u64);
                let run = |mode| {
                    let data = pair_dataset(san, aux, pairs, mode)?;
                    cross_validate_5x2(&data, &config.forest_config(), &config.smote, fold_seed)
                };
                Ok((run(FeatureMode::Gs)?, run(FeatureMode::GsLbl)?))
            })
            .collect::<Result<Vec<(CvResult, CvResult)>>>()
    })?;

    let mut report = AttackReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        seeds,
        graph: summary,
        labeling,
        attribute_estimate,
        population_size: split_summaries.iter().map(|s| s.population).sum(),
        splits: split_summaries,
        subsample_splits: samples.iter().map(|(j, _)| splits[*j].lineage.clone()).collect(),
        f1: PairedScoreVectors {
            gs: results.iter().map(|r| r.0.mean_f1).collect(),
            gs_lbl: results.iter().map(|r| r.1.mean_f1).collect(),
        },
        gs_mean_f1: 0.0,
        gs_lbl_mean_f1: 0.0,
        t_test: None,
        t_test_note: None,
        importances: Vec::new(),
        omitted_features: Vec::new(),
        kde: Vec::new(),
        timings_ms: BTreeMap::new(),
        kde_curves: Vec::new(),
    };
    timings.time("stats", || {
        summarize(&mut report, &results, config);
        Ok(())
    })?;
    report.config.output = Default::default();
    report.timings_ms = timings.0;
    Ok(report)
}

/// Subsample `i` comes from split `i mod k`.
fn draw_subsamples(
    splits: &[OverlapSplit],
    config: &ExperimentConfig,
    sampling_seed: u64,
    summaries: &mut Vec<SplitSummary>,
) -> Result<Vec<(usize, Vec<PairExample>)>> {
    let k = splits.len();
    let total = config.sampling.subsamples;
    let mut per_split = Vec::with_capacity(k);
    for (j, split) in splits.iter().enumerate() {
        let population = PairPopulation::new(split)?;
        summaries.push(SplitSummary {
            lineage: split.lineage.clone(),
            san_nodes: split.san.node_count(),
            aux_nodes: split.aux.node_count(),
            overlap: split.overlap.len(),
            jaccard: jaccard_overlap(split),
            population: population.size(),
        });
        let count = (total + k - 1 - j) / k;
        if count == 0 {
            per_split.push(Vec::new().into_iter());
            continue;
        }
        let mut plan = config.sample_plan(seed::derive(sampling_seed, j as u64));
        plan.subsamples = count;
        let drawn = reservoir_subsamples(&population, &plan)?;
        info!(
            "split {}: |S| = {}, {} subsamples, {} identical pairs each",
            split.lineage,
            population.size(),
            count,
            drawn.positive_quota
        );
        per_split.push(drawn.samples.into_iter());
    }
    Ok((0..total)
        .map(|i| {
            let j = i % k;
            (j, per_split[j].next().expect("subsample count per split"))
        })
        .collect())
}

/// Rows `[sig(san) ‖ sig(aux)]` for the given pairs, in pair order.
pub fn pair_dataset(
    san: &SignatureTable,
    aux: &SignatureTable,
    pairs: &[PairExample],
    mode: FeatureMode,
) -> Result<Dataset> {
    let names = feature_names(san.config, mode).iter().map(|n| n.to_string()).collect();
    let mut data = Dataset::new(names);
    let mut row = Vec::with_capacity(san.config.feature_count(mode));
    for p in pairs {
        row.clear();
        append_pair_features(san.get(p.san), aux.get(p.aux), mode, &mut row)?;
        data.push(&row, p.label)?;
    }
    Ok(data)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let m = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (m, 0.0);
    }
    let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, var.sqrt())
}

fn summarize(report: &mut AttackReport, results: &[(CvResult, CvResult)], config: &ExperimentConfig) {
    report.gs_mean_f1 = mean_std(&report.f1.gs).0;
    report.gs_lbl_mean_f1 = mean_std(&report.f1.gs_lbl).0;
    match t_statistic(&report.f1, config.stats.test) {
        Ok(t) => report.t_test = Some(t),
        Err(e) => report.t_test_note = Some(e.to_string()),
    }

    for mode in FeatureMode::BOTH {
        let pick = |r: &(CvResult, CvResult)| -> CvResult {
            match mode {
                FeatureMode::Gs => r.0.clone(),
                FeatureMode::GsLbl => r.1.clone(),
            }
        };
        let defined: Vec<Vec<f64>> = results
            .iter()
            .map(pick)
            .filter(|r| r.importance_defined)
            .map(|r| r.importances)
            .collect();
        for (f, name) in feature_names(config.signature, mode).iter().enumerate() {
            let column: Vec<f64> = defined.iter().map(|v| v[f]).collect();
            let (mean, std) = mean_std(&column);
            let entry = ImportanceEntry {
                mode,
                feature: name.to_string(),
                mean,
                std,
            };
            let kept = !defined.is_empty() && mean >= config.stats.importance_floor;
            if kept && mode == FeatureMode::GsLbl {
                report.kde.push(kde_entry(&entry.feature, &column, config, &mut report.kde_curves));
            }
            if kept {
                report.importances.push(entry);
            } else {
                report.omitted_features.push(entry);
            }
        }
    }
}

fn kde_entry(
    feature: &str,
    samples: &[f64],
    config: &ExperimentConfig,
    curves: &mut Vec<(String, crate::stats::KdeCurve)>,
) -> KdeSummary {
    let mut summary = KdeSummary {
        feature: feature.to_string(),
        samples: samples.len(),
        bandwidth: None,
        point_mass: None,
        file: None,
    };
    match gaussian_kde(samples, config.stats.kde_points) {
        Ok(curve) => {
            summary.bandwidth = Some(curve.bandwidth);
            summary.file = Some(kde_file_name(feature));
            curves.push((feature.to_string(), curve));
        }
        Err(Error::PointMass { at }) => summary.point_mass = Some(at),
        Err(_) => {}
    }
    summary
}
