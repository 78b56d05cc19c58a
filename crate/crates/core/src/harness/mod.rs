//! Experiment plans, the parallel trial runner, result persistence and the
//! report writers behind the command line tool.

mod plan;
mod report;
mod robustness;
mod runner;

pub use plan::{slug, stable_hash, Algorithm, Cell, ExperimentPlan, Overrides, Problem, RESULT_FORMAT};
pub use report::{EcdfRow, LineageRow, ResultTable, TargetRow, WilcoxonRow, ALPHA, ECDF_POINTS, SUITE};
pub use robustness::{improvement_rate, robustness_roles, robustness_table, write_robustness, RobustnessRow, RATE_UNIT};
pub use runner::{
    load_results, run_experiment, run_in_memory, run_trial, Manifest, ManifestCell, RunSummary, StoredTrial,
    TrialOutcome, TrialSummary, MANIFEST, RECORDS_DIR,
};
