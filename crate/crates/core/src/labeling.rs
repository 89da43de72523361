//! Attraction-model labeling: place a binary attribute on a fixed topology
//! so that the number of cross-group edges matches the diversity `p` and the
//! inbreeding coefficient `τ`, and estimate `(p, τ)` back from a labeled
//! graph.
//!
//! The target number of cross-group ties is `δ = 2·|E|·(1−τ)·p·(1−p)`. Labels
//! start as a random `p / 1−p` split and are improved by drawing one `R` and
//! one `B` node at random and swapping their labels whenever that lowers the
//! cross-tie count. Labels are only ever exchanged, so group sizes and the
//! topology never change. Some `(p, τ)` targets are unreachable on a given
//! topology; those runs stop at the swap budget and report `converged: false`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AttrValue, Graph, NodeId};
use crate::seed;

/// Default swap budget per node.
pub const SWAPS_PER_NODE: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelingParams {
    pub p: f64,
    pub tau: f64,
    pub seed: u64,
    /// Swap attempts; `None` means `200·N`.
    pub max_iters: Option<u64>,
}

impl LabelingParams {
    pub fn new(p: f64, tau: f64, seed: u64) -> Self {
        LabelingParams {
            p,
            tau,
            seed,
            max_iters: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::invalid(format!("p must lie in (0, 1), got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::invalid(format!("tau must lie in [0, 1], got {}", self.tau)));
        }
        Ok(())
    }

    /// Minority proportion, `min(p, 1−p)`.
    pub fn minority(&self) -> f64 {
        self.p.min(1.0 - self.p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingResult {
    pub assignment: Vec<AttrValue>,
    pub achieved_cross_ties: u64,
    pub target_delta: u64,
    /// Swap attempts made.
    pub iterations: u64,
    pub accepted_swaps: u64,
    /// Cross ties removed by the last accepted swap.
    pub last_swap_gain: u64,
    pub converged: bool,
}

/// `round(2·E·(1−τ)·p·(1−p))`.
pub fn target_cross_ties(edge_count: usize, p: f64, tau: f64) -> u64 {
    (2.0 * edge_count as f64 * (1.0 - tau) * p * (1.0 - p)).round() as u64
}

/// Edges whose endpoints carry different values.
pub fn cross_tie_count(graph: &Graph, assignment: &[AttrValue]) -> Result<u64> {
    if assignment.len() < graph.node_count() {
        return Err(Error::MissingAttribute(
            graph.source_id(assignment.len()).to_string(),
        ));
    }
    if assignment.len() > graph.node_count() {
        return Err(Error::UnknownNode(graph.node_count().to_string()));
    }
    Ok(graph
        .edges()
        .filter(|&(u, v)| assignment[u] != assignment[v])
        .count() as u64)
}

/// Number of `u`'s neighbours labelled `value`.
fn neighbours_with(graph: &Graph, labels: &[AttrValue], u: NodeId, value: AttrValue) -> i64 {
    graph.neighbors(u).iter().filter(|&&v| labels[v] == value).count() as i64
}

/// Change in cross ties if `r` (currently R) and `b` (currently B) trade labels.
fn swap_delta(graph: &Graph, labels: &[AttrValue], r: NodeId, b: NodeId) -> i64 {
    let r_side = neighbours_with(graph, labels, r, AttrValue::R)
        - neighbours_with(graph, labels, r, AttrValue::B);
    let b_side = neighbours_with(graph, labels, b, AttrValue::B)
        - neighbours_with(graph, labels, b, AttrValue::R);
    // an r-b edge stays cross after the swap but both sides counted it as fixed
    let shared = if graph.has_edge(r, b) { 2 } else { 0 };
    r_side + b_side + shared
}

pub fn assign_labels(graph: &Graph, params: &LabelingParams) -> Result<LabelingResult> {
    params.validate()?;
    let n = graph.node_count();
    let minority = (params.minority() * n as f64).round() as usize;
    let target = target_cross_ties(graph.edge_count(), params.p, params.tau);
    let budget = params.max_iters.unwrap_or(SWAPS_PER_NODE * n as u64);
    let mut rng = seed::rng(params.seed);

    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut labels = vec![AttrValue::R; n];
    for &u in &order[..minority] {
        labels[u] = AttrValue::B;
    }
    // pools[v.index()] lists the nodes currently labelled v
    let mut pools: [Vec<NodeId>; 2] = [order[minority..].to_vec(), order[..minority].to_vec()];

    let mut cross = cross_tie_count(graph, &labels)?;
    let (mut iterations, mut accepted, mut last_gain) = (0u64, 0u64, 0u64);
    let can_swap = !pools[0].is_empty() && !pools[1].is_empty();
    while cross > target && iterations < budget && can_swap {
        iterations += 1;
        let i = rng.gen_range(0..pools[0].len());
        let j = rng.gen_range(0..pools[1].len());
        let (r, b) = (pools[0][i], pools[1][j]);
        let delta = swap_delta(graph, &labels, r, b);
        if delta < 0 {
            labels[r] = AttrValue::B;
            labels[b] = AttrValue::R;
            pools[0][i] = b;
            pools[1][j] = r;
            cross -= (-delta) as u64;
            last_gain = (-delta) as u64;
            accepted += 1;
        }
    }
    debug_assert_eq!(cross, cross_tie_count(graph, &labels).unwrap());
    Ok(LabelingResult {
        assignment: labels,
        achieved_cross_ties: cross,
        target_delta: target,
        iterations,
        accepted_swaps: accepted,
        last_swap_gain: last_gain,
        converged: cross <= target,
    })
}

/// Estimated attraction-model parameters of a labeled graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamEstimate {
    /// Minority fraction.
    pub p: f64,
    /// Inbreeding coefficient, clamped to `[0, 1]`.
    pub tau: f64,
    pub cross_fraction: f64,
    /// Set when the raw estimate fell outside `[0, 1]`.
    pub clamped: bool,
}

pub fn estimate_from_counts(minority_fraction: f64, cross_fraction: f64) -> Result<ParamEstimate> {
    let p = minority_fraction.min(1.0 - minority_fraction);
    if p <= 0.0 {
        return Err(Error::SingleLabel);
    }
    let raw = 1.0 - cross_fraction / (2.0 * p * (1.0 - p));
    let tau = raw.clamp(0.0, 1.0);
    Ok(ParamEstimate {
        p,
        tau,
        cross_fraction,
        clamped: tau != raw,
    })
}

pub fn estimate_params(graph: &Graph) -> Result<ParamEstimate> {
    let attrs = graph.attributes().ok_or(Error::Unlabeled)?;
    if graph.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let [r, b] = attrs.counts();
    if r == 0 || b == 0 {
        return Err(Error::SingleLabel);
    }
    let cross = cross_tie_count(graph, &attrs.values)?;
    estimate_from_counts(
        b as f64 / graph.node_count() as f64,
        cross as f64 / graph.edge_count() as f64,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCell {
    pub p: f64,
    pub tau: f64,
    pub converged: bool,
    pub achieved_cross_ties: u64,
    pub target_delta: u64,
    pub achieved_fraction: f64,
    pub iterations: u64,
}

/// Runs the labeler for every `(p, τ)` cell, each with its own derived seed.
pub fn feasibility_grid(
    graph: &Graph,
    p_values: &[f64],
    tau_values: &[f64],
    seed: u64,
) -> Result<Vec<FeasibilityCell>> {
    let cells: Vec<(usize, f64, f64)> = p_values
        .iter()
        .flat_map(|&p| tau_values.iter().map(move |&t| (p, t)))
        .enumerate()
        .map(|(i, (p, t))| (i, p, t))
        .collect();
    let e = graph.edge_count().max(1) as f64;
    cells
        .par_iter()
        .map(|&(i, p, tau)| {
            let r = assign_labels(graph, &LabelingParams::new(p, tau, seed::derive(seed, i as u64)))?;
            Ok(FeasibilityCell {
                p,
                tau,
                converged: r.converged,
                achieved_cross_ties: r.achieved_cross_ties,
                target_delta: r.target_delta,
                achieved_fraction: r.achieved_cross_ties as f64 / e,
                iterations: r.iterations,
            })
        })
        .collect()
}

pub fn write_feasibility_csv<W: Write>(mut w: W, cells: &[FeasibilityCell]) -> std::io::Result<()> {
    writeln!(w, "p,tau,converged,achieved_fraction,iterations")?;
    for c in cells {
        writeln!(
            w,
            "{},{},{},{},{}",
            c.p, c.tau, c.converged, c.achieved_fraction, c.iterations
        )?;
    }
    Ok(())
}

pub fn save_feasibility_csv(path: &Path, cells: &[FeasibilityCell]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    write_feasibility_csv(&mut w, cells).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn delta_formula() {
        assert_eq!(target_cross_ties(100, 0.5, 0.0), 50);
        assert_eq!(target_cross_ties(100, 0.5, 1.0), 0);
        assert_eq!(target_cross_ties(16718, 0.48, 0.84), 1335);
        assert_eq!(target_cross_ties(0, 0.3, 0.2), 0);
    }

    #[test]
    fn cross_ties_simple() {
        let (k22, _) = Graph::from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        use AttrValue::*;
        assert_eq!(cross_tie_count(&k22, &[R, R, R, R]).unwrap(), 0);
        assert_eq!(cross_tie_count(&k22, &[R, R, B, B]).unwrap(), 4);
        assert!(cross_tie_count(&k22, &[R, R]).is_err());
    }

    #[test]
    fn swap_delta_matches_recount() {
        let g = generate::gnm(40, 120, 1);
        let mut rng = seed::rng(3);
        for _ in 0..200 {
            let labels: Vec<AttrValue> = (0..40)
                .map(|_| if rng.gen_bool(0.4) { AttrValue::B } else { AttrValue::R })
                .collect();
            let r = (0..40).find(|&u| labels[u] == AttrValue::R).unwrap();
            let b = (0..40).rev().find(|&u| labels[u] == AttrValue::B).unwrap();
            let before = cross_tie_count(&g, &labels).unwrap() as i64;
            let mut after = labels.clone();
            after.swap(r, b);
            let after = cross_tie_count(&g, &after).unwrap() as i64;
            assert_eq!(swap_delta(&g, &labels, r, b), after - before);
        }
    }

    #[test]
    fn cycle_cannot_reach_zero() {
        let g = generate::cycle(30);
        let r = assign_labels(&g, &LabelingParams::new(0.5, 1.0, 7)).unwrap();
        assert!(!r.converged);
        assert!(r.achieved_cross_ties >= 2);
        assert_eq!(r.iterations, SWAPS_PER_NODE * 30);
    }

    #[test]
    fn two_cliques_reach_single_bridge() {
        let g = generate::two_cliques(50, 1);
        let params = LabelingParams::new(0.5, 0.999, 11);
        let r = assign_labels(&g, &params).unwrap();
        assert_eq!(r.target_delta, 1);
        assert!(r.converged);
        assert_eq!(r.achieved_cross_ties, 1);
        assert_eq!(cross_tie_count(&g, &r.assignment).unwrap(), 1);
    }

    #[test]
    fn group_sizes_fixed() {
        let g = generate::gnm(101, 400, 5);
        for p in [0.1, 0.37, 0.5, 0.8] {
            let r = assign_labels(&g, &LabelingParams::new(p, 0.6, 2)).unwrap();
            let b = r.assignment.iter().filter(|&&v| v == AttrValue::B).count();
            assert_eq!(b, (p.min(1.0 - p) * 101.0).round() as usize);
        }
    }

    #[test]
    fn estimates() {
        let e = estimate_from_counts(0.48, 0.08).unwrap();
        assert!((e.tau - 0.84).abs() < 0.01);
        let chance = estimate_from_counts(0.3, 2.0 * 0.3 * 0.7).unwrap();
        assert!(chance.tau.abs() < 1e-12);
        assert_eq!(estimate_from_counts(0.3, 0.0).unwrap().tau, 1.0);
        let hetero = estimate_from_counts(0.5, 0.9).unwrap();
        assert!(hetero.clamped);
        assert_eq!(hetero.tau, 0.0);

        let g = generate::cycle(6);
        assert!(matches!(estimate_params(&g), Err(Error::Unlabeled)));
        let single = g.with_attributes(vec![AttrValue::R; 6]).unwrap();
        assert!(matches!(estimate_params(&single), Err(Error::SingleLabel)));
    }

    #[test]
    fn invalid_params() {
        let g = generate::cycle(6);
        assert!(assign_labels(&g, &LabelingParams::new(0.0, 0.5, 1)).is_err());
        assert!(assign_labels(&g, &LabelingParams::new(0.5, 1.5, 1)).is_err());
    }
}
