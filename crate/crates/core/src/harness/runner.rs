use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plan::{Cell, ExperimentPlan};
use crate::engines::{self, RunOptions, Silent};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::record::{RunRecord, TrajectoryPoint};
use crate::rng::RNG_NAME;

pub const MANIFEST: &str = "manifest.json";
pub const RECORDS_DIR: &str = "records";

/// Per-trial result file, written after the trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub plan_hash: String,
    pub algorithm: String,
    pub problem: String,
    pub trial: usize,
    pub seed: u64,
    pub shift: Vec<f64>,
    pub final_best: f64,
    pub evaluations: u64,
    pub failed_parent_updates: u64,
    pub total_bsf_updates: u64,
    pub failed_parent_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestCell {
    pub algorithm: String,
    pub problem: String,
    pub trial: usize,
    pub seed: u64,
    pub stem: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub plan_hash: String,
    pub version: String,
    pub rng: String,
    pub plan: ExperimentPlan,
    pub cells: Vec<ManifestCell>,
}

impl Manifest {
    pub fn for_plan(plan: &ExperimentPlan) -> Self {
        let cells = plan
            .cells()
            .into_iter()
            .map(|c| ManifestCell {
                algorithm: plan.algorithms[c.algorithm].label.clone(),
                problem: plan.problems[c.problem].label(),
                trial: c.trial,
                seed: plan.trial_seed(c),
                stem: plan.cell_stem(c),
            })
            .collect();
        Self {
            plan_hash: plan.hash(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_NAME.to_string(),
            plan: plan.clone(),
            cells,
        }
    }

    pub fn read(out: &Path) -> Result<Self> {
        let path = out.join(MANIFEST);
        let text = fs::read_to_string(&path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// One finished trial held in memory.
#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub cell: Cell,
    pub seed: u64,
    pub shift: Vec<f64>,
    pub record: RunRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunSummary {
    pub computed: usize,
    pub skipped: usize,
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("workers must be positive".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
}

/// Runs a single cell of the plan.
pub fn run_trial(plan: &ExperimentPlan, cell: Cell) -> Result<TrialOutcome> {
    let problem = &plan.problems[cell.problem];
    let spec = problem.instance(plan.shift_seed, cell.trial)?;
    let shift = spec.shift.clone();
    let seed = plan.trial_seed(cell);
    let options = RunOptions { stride: plan.stride, record_t_trace: plan.record_t_trace, ..Default::default() };
    let mut objective = Objective::new(spec);
    let record = engines::run_with(&plan.algorithms[cell.algorithm].config, &mut objective, seed, &options, &mut Silent)?;
    Ok(TrialOutcome { cell, seed, shift, record })
}

/// Runs every cell without touching the disk; results are in cell order
/// whatever the worker count.
pub fn run_in_memory(plan: &ExperimentPlan, workers: Option<usize>) -> Result<Vec<TrialOutcome>> {
    plan.validate()?;
    let cells = plan.cells();
    pool(workers)?.install(|| cells.par_iter().map(|&c| run_trial(plan, c)).collect())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(tmp, path)?;
    Ok(())
}

fn record_paths(plan: &ExperimentPlan, cell: Cell) -> (PathBuf, PathBuf) {
    let dir = plan.out.join(RECORDS_DIR);
    let stem = plan.cell_stem(cell);
    (dir.join(format!("{stem}.csv")), dir.join(format!("{stem}.json")))
}

fn read_summary(path: &Path) -> Result<TrialSummary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn is_complete(plan: &ExperimentPlan, hash: &str, cell: Cell) -> Result<bool> {
    let (csv, json) = record_paths(plan, cell);
    if !json.exists() {
        return Ok(false);
    }
    let summary = read_summary(&json)?;
    if summary.plan_hash != hash {
        return Err(Error::ResultMismatch(format!(
            "{} was produced by plan {}, current plan is {hash}",
            json.display(),
            summary.plan_hash
        )));
    }
    Ok(csv.exists())
}

fn persist(plan: &ExperimentPlan, hash: &str, outcome: &TrialOutcome) -> Result<()> {
    let (csv_path, json_path) = record_paths(plan, outcome.cell);
    let stem = plan.cell_stem(outcome.cell);
    let mut csv = format!("# plan_hash={hash}\n").into_bytes();
    outcome.record.write_csv(&stem, &mut csv)?;
    write_atomic(&csv_path, &csv)?;
    if let Some(trace) = &outcome.record.t_trace {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["eval_count", "T"])?;
        for (e, t) in trace {
            w.write_record([e.to_string(), t.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
        write_atomic(&csv_path.with_extension("t.csv"), &bytes)?;
    }
    let r = &outcome.record;
    let summary = TrialSummary {
        plan_hash: hash.to_string(),
        algorithm: plan.algorithms[outcome.cell.algorithm].label.clone(),
        problem: plan.problems[outcome.cell.problem].label(),
        trial: outcome.cell.trial,
        seed: outcome.seed,
        shift: outcome.shift.clone(),
        final_best: r.final_best,
        evaluations: r.evaluations,
        failed_parent_updates: r.failed_parent_updates,
        total_bsf_updates: r.total_bsf_updates,
        failed_parent_fraction: r.failed_parent_fraction(),
    };
    write_atomic(&json_path, &serde_json::to_vec_pretty(&summary)?)
}

/// Executes the plan into `plan.out`. Trials already on disk for the same
/// plan are skipped; results of a different plan abort the run.
pub fn run_experiment(plan: &ExperimentPlan, workers: Option<usize>) -> Result<RunSummary> {
    plan.validate()?;
    let hash = plan.hash();
    let manifest_path = plan.out.join(MANIFEST);
    if manifest_path.exists() {
        let existing = Manifest::read(&plan.out)?;
        if existing.plan_hash != hash {
            return Err(Error::ResultMismatch(format!(
                "{} holds results of plan {}, current plan is {hash}",
                plan.out.display(),
                existing.plan_hash
            )));
        }
    }
    fs::create_dir_all(plan.out.join(RECORDS_DIR))?;
    write_atomic(&manifest_path, &serde_json::to_vec_pretty(&Manifest::for_plan(plan))?)?;

    let mut pending = Vec::new();
    let mut skipped = 0;
    for cell in plan.cells() {
        if is_complete(plan, &hash, cell)? {
            skipped += 1;
        } else {
            pending.push(cell);
        }
    }
    pool(workers)?.install(|| {
        pending
            .par_iter()
            .try_for_each(|&cell| run_trial(plan, cell).and_then(|o| persist(plan, &hash, &o)))
    })?;
    Ok(RunSummary { computed: pending.len(), skipped })
}

/// A trial read back from disk.
#[derive(Debug, Clone)]
pub struct StoredTrial {
    pub cell: Cell,
    pub summary: TrialSummary,
    pub trajectory: Vec<TrajectoryPoint>,
}

impl StoredTrial {
    /// Rebuilds the parts of the run record the analysis needs.
    pub fn record(&self) -> RunRecord {
        let mut r = RunRecord::new(0);
        r.trajectory = self.trajectory.clone();
        r.final_best = self.summary.final_best;
        r.evaluations = self.summary.evaluations;
        r.failed_parent_updates = self.summary.failed_parent_updates;
        r.total_bsf_updates = self.summary.total_bsf_updates;
        r
    }
}

/// Loads a complete result set, checking every file against the manifest.
pub fn load_results(out: &Path) -> Result<(ExperimentPlan, Vec<StoredTrial>)> {
    let manifest = Manifest::read(out)?;
    let mut plan = manifest.plan;
    plan.out = out.to_path_buf();
    if plan.hash() != manifest.plan_hash {
        return Err(Error::ResultMismatch("manifest plan does not match its hash".into()));
    }
    let mut trials = Vec::new();
    for cell in plan.cells() {
        let (csv, json) = record_paths(&plan, cell);
        if !json.exists() || !csv.exists() {
            return Err(Error::InvalidInput(format!(
                "missing results for {}; run the plan to completion first",
                plan.cell_stem(cell)
            )));
        }
        let summary = read_summary(&json)?;
        if summary.plan_hash != manifest.plan_hash {
            return Err(Error::ResultMismatch(format!("{} belongs to another plan", json.display())));
        }
        let trajectory = RunRecord::read_trajectory_csv(fs::File::open(&csv)?)?;
        trials.push(StoredTrial { cell, summary, trajectory });
    }
    Ok((plan, trials))
}
