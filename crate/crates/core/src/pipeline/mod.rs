//! End-to-end experiments: load or label a graph, split it, sample pairs,
//! cross-validate GS and GS(LBL) classifiers on the same pairs and compare
//! them.

mod attack;
mod config;
mod report;
mod sweep;

pub use attack::{load_graph, pair_dataset, run_attack, run_attack_on};
pub use config::{
    ExperimentConfig, ForestSection, GraphSource, LabelingSection, OutputSection, RuntimeSection, SamplingSection,
    SeedSection, SplitSection, StageSeeds, StatsSection,
};
pub use report::{
    emit_reports, kde_file_name, AttackReport, GraphSummary, ImportanceEntry, KdeSummary, LabelingSummary,
    SplitSummary, F1_FILE, GRID_FILE, IMPORTANCE_FILTERED_FILE, IMPORTANCE_FULL_FILE, REPORT_FILE, SCHEMA_VERSION,
};
pub use sweep::{cell_dir_name, emit_sweep, sweep_grid, CellStatus, SweepCell, SweepReport};
