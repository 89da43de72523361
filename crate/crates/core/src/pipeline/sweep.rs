use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use log::warn;
use serde::{Deserialize, Serialize};

use super::attack::{run_attack_timed, topology_metrics, Timings};
use super::config::{ExperimentConfig, LabelingSection};
use super::report::{emit_reports, AttackReport, LabelingSummary, GRID_FILE};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    /// Attack ran but the t-statistic is undefined.
    Degenerate,
    /// Labeling did not reach the cross-tie target.
    Skipped,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Ok => "ok",
            CellStatus::Degenerate => "degenerate",
            CellStatus::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub p: f64,
    pub tau: f64,
    pub status: CellStatus,
    pub report: Option<AttackReport>,
    /// Labeler outcome for skipped cells.
    pub labeling: Option<LabelingSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// p-major.
    pub cells: Vec<SweepCell>,
}

/// One attack per `(p, τ)` cell on a fixed topology. Each cell relabels the
/// whole graph with the same labeling seed; the split depends on topology
/// and split seed alone, so every cell attacks the same node sets.
/// Cells whose labeling does not converge are recorded as skipped.
pub fn sweep_grid(
    graph: &Graph,
    config: &ExperimentConfig,
    p_values: &[f64],
    tau_values: &[f64],
) -> Result<SweepReport> {
    if p_values.is_empty() || tau_values.is_empty() {
        return Err(Error::invalid("sweep grids must be nonempty"));
    }
    if config.graph.as_ref().is_some_and(|g| g.attributes.is_some()) {
        return Err(Error::Config("a sweep relabels the graph; drop graph.attributes".into()));
    }
    let max_iters = config.labeling.and_then(|l| l.max_iters);
    let base = ExperimentConfig {
        labeling: Some(LabelingSection {
            p: p_values[0],
            tau: tau_values[0],
            max_iters,
        }),
        ..config.clone()
    };
    base.validate()?;
    let topology = graph.clone().without_attributes();
    let mut timings = Timings::default();
    let summary = topology_metrics(&topology, &base.seeds.resolve()?, &mut timings)?;

    let mut cells = Vec::with_capacity(p_values.len() * tau_values.len());
    for &p in p_values {
        for &tau in tau_values {
            let cell_cfg = ExperimentConfig {
                labeling: Some(LabelingSection { p, tau, max_iters }),
                ..base.clone()
            };
            cell_cfg.validate()?;
            match run_attack_timed(&topology, &cell_cfg, Some(summary.clone()), Timings::default()) {
                Ok(report) => cells.push(SweepCell {
                    p,
                    tau,
                    status: if report.t_test.is_some() {
                        CellStatus::Ok
                    } else {
                        CellStatus::Degenerate
                    },
                    report: Some(report),
                    labeling: None,
                }),
                Err(e) => match e.root() {
                    Error::NotConverged(r) => {
                        warn!("cell p={p} tau={tau} skipped: {e}");
                        cells.push(SweepCell {
                            p,
                            tau,
                            status: CellStatus::Skipped,
                            report: None,
                            labeling: Some(LabelingSummary::new(p, tau, r)),
                        });
                    }
                    _ => return Err(e),
                },
            }
        }
    }
    Ok(SweepReport { cells })
}

impl SweepReport {
    /// `p,tau,t_statistic,gs_mean,gs_lbl_mean,status`; numeric fields are
    /// empty where undefined.
    pub fn write_grid_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "p,tau,t_statistic,gs_mean,gs_lbl_mean,status")?;
        for c in &self.cells {
            let (t, gs, lbl) = match &c.report {
                Some(r) => (
                    r.t_statistic().map(|t| t.to_string()).unwrap_or_default(),
                    r.gs_mean_f1.to_string(),
                    r.gs_lbl_mean_f1.to_string(),
                ),
                None => Default::default(),
            };
            writeln!(w, "{},{},{t},{gs},{lbl},{}", c.p, c.tau, c.status)?;
        }
        Ok(())
    }
}

pub fn cell_dir_name(p: f64, tau: f64) -> String {
    format!("p{p}_tau{tau}")
}

/// Writes `grid.csv` and, per attacked cell, the single-run report files
/// under `p<p>_tau<tau>/`.
pub fn emit_sweep(sweep: &SweepReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let grid = dir.join(GRID_FILE);
    let mut buf = Vec::new();
    sweep.write_grid_csv(&mut buf).map_err(|e| Error::io(&grid, e))?;
    fs::write(&grid, buf).map_err(|e| Error::io(&grid, e))?;
    let mut written = vec![grid];
    for c in &sweep.cells {
        if let Some(r) = &c.report {
            written.extend(emit_reports(r, &dir.join(cell_dir_name(c.p, c.tau)))?);
        }
    }
    Ok(written)
}
