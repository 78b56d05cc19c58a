//! Per-trial run bookkeeping: best-so-far trajectory and lineage counters.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub evals: u64,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Best-so-far fitness at every improvement and every checkpoint.
    pub trajectory: Vec<TrajectoryPoint>,
    pub final_best: f64,
    pub evaluations: u64,
    /// Checkpoint stride in evaluations (0 disables checkpoints).
    pub stride: u64,
    /// Best-so-far updates made by offspring whose parent had failed.
    pub failed_parent_updates: u64,
    /// Best-so-far updates made by offspring (initial population excluded).
    pub total_bsf_updates: u64,
    /// `(evaluation, T)` for every offspring of an adaptive-T run, when enabled.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_trace: Option<Vec<(u64, f64)>>,
}

impl RunRecord {
    pub fn new(stride: u64) -> Self {
        Self {
            trajectory: Vec::new(),
            final_best: f64::INFINITY,
            evaluations: 0,
            stride,
            failed_parent_updates: 0,
            total_bsf_updates: 0,
            t_trace: None,
        }
    }

    /// Registers a strict improvement of the best-so-far fitness at evaluation
    /// `eval`. `parent_successful` is `None` for members of the initial
    /// population, which extend the trajectory without touching the lineage
    /// counters.
    pub fn record_improvement(&mut self, eval: u64, fitness: f64, parent_successful: Option<bool>) {
        debug_assert!(self.trajectory.is_empty() || fitness < self.final_best);
        self.final_best = fitness;
        self.evaluations = self.evaluations.max(eval);
        self.push_point(eval, fitness);
        if let Some(ok) = parent_successful {
            self.total_bsf_updates += 1;
            if !ok {
                self.failed_parent_updates += 1;
            }
        }
    }

    /// Called after every evaluation; writes a point on stride multiples.
    pub fn record_evaluation(&mut self, eval: u64) {
        self.evaluations = eval;
        if self.stride > 0 && eval.is_multiple_of(self.stride) && self.final_best.is_finite() {
            self.push_point(eval, self.final_best);
        }
    }

    /// Closes the trajectory with a point at the last evaluation.
    pub fn finish(&mut self) {
        if self.final_best.is_finite() {
            self.push_point(self.evaluations, self.final_best);
        }
    }

    fn push_point(&mut self, evals: u64, best: f64) {
        match self.trajectory.last_mut() {
            Some(last) if last.evals == evals => last.best = best,
            _ => self.trajectory.push(TrajectoryPoint { evals, best }),
        }
    }

    /// Best-so-far after `eval` evaluations, `None` before the first one.
    /// Evaluation counts past the end clamp to the final value.
    pub fn best_at(&self, eval: u64) -> Option<f64> {
        let idx = self.trajectory.partition_point(|p| p.evals <= eval);
        idx.checked_sub(1).map(|i| self.trajectory[i].best)
    }

    pub fn failed_parent_fraction(&self) -> Option<f64> {
        (self.total_bsf_updates > 0)
            .then(|| self.failed_parent_updates as f64 / self.total_bsf_updates as f64)
    }

    /// One row per trajectory point: `trial_id,eval_count,best_so_far`.
    pub fn write_csv<W: Write>(&self, trial_id: &str, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["trial_id", "eval_count", "best_so_far"])?;
        for p in &self.trajectory {
            w.write_record([trial_id, &p.evals.to_string(), &p.best.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the trajectory rows written by [`RunRecord::write_csv`].
    /// Lines starting with `#` are skipped.
    pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryPoint>> {
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
        let mut out = Vec::new();
        for row in r.deserialize::<(String, u64, f64)>() {
            let (_, evals, best) = row?;
            out.push(TrajectoryPoint { evals, best });
        }
        Ok(out)
    }
}
