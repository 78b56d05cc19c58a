use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::plan::ExperimentPlan;
use super::runner::{StoredTrial, TrialOutcome};
use crate::analysis::{ecdf_curve, ecdf_targets, eval_grid, mean_curve, wilcoxon_rank_sum, EcdfTargets, Verdict, EXACT_LIMIT};
use crate::error::Result;
use crate::record::RunRecord;

/// Grid resolution of the ECDF output.
pub const ECDF_POINTS: usize = 100;
pub const ALPHA: f64 = 0.05;
/// Problem column of the suite-level ECDF rows.
pub const SUITE: &str = "suite";

/// Records of a plan, indexed by `(algorithm, problem)` and ordered by trial.
#[derive(Debug, Clone)]
pub struct ResultTable {
    pub plan: ExperimentPlan,
    cells: BTreeMap<(usize, usize), Vec<RunRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetRow {
    pub problem: String,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EcdfRow {
    pub algorithm: String,
    pub problem: String,
    pub eval: u64,
    pub attainment: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonRow {
    pub problem: String,
    pub alg_a: String,
    pub alg_b: String,
    pub p: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineageRow {
    pub algorithm: String,
    pub problem: String,
    pub trial: usize,
    pub fraction: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AnalysisMeta<'a> {
    plan_hash: String,
    quantile: &'a str,
    ecdf_comparison: &'a str,
    ecdf_points: usize,
    wilcoxon_exact_limit: usize,
    alpha: f64,
}

impl ResultTable {
    pub fn from_outcomes(plan: &ExperimentPlan, outcomes: Vec<TrialOutcome>) -> Self {
        let mut sorted = outcomes;
        sorted.sort_by_key(|o| o.cell);
        let mut cells: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for o in sorted {
            cells.entry((o.cell.algorithm, o.cell.problem)).or_default().push(o.record);
        }
        Self { plan: plan.clone(), cells }
    }

    pub fn from_stored(plan: &ExperimentPlan, trials: &[StoredTrial]) -> Self {
        let mut sorted: Vec<&StoredTrial> = trials.iter().collect();
        sorted.sort_by_key(|t| t.cell);
        let mut cells: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for t in sorted {
            cells.entry((t.cell.algorithm, t.cell.problem)).or_default().push(t.record());
        }
        Self { plan: plan.clone(), cells }
    }

    pub fn records(&self, algorithm: usize, problem: usize) -> &[RunRecord] {
        self.cells.get(&(algorithm, problem)).map_or(&[], Vec::as_slice)
    }

    pub fn finals(&self, algorithm: usize, problem: usize) -> Vec<f64> {
        self.records(algorithm, problem).iter().map(|r| r.final_best).collect()
    }

    /// Targets from the finals of every algorithm on `problem`.
    pub fn targets(&self, problem: usize) -> Result<EcdfTargets> {
        let pooled: Vec<f64> = (0..self.plan.algorithms.len())
            .flat_map(|a| self.finals(a, problem))
            .collect();
        ecdf_targets(&pooled)
    }

    pub fn target_rows(&self) -> Result<Vec<TargetRow>> {
        (0..self.plan.problems.len())
            .map(|p| {
                let t = self.targets(p)?;
                Ok(TargetRow { problem: self.plan.problems[p].label(), q1: t.q1, median: t.median, q3: t.q3 })
            })
            .collect()
    }

    /// Per-problem curves plus suite rows when all problems share a budget.
    pub fn ecdf_rows(&self) -> Result<Vec<EcdfRow>> {
        let problems = &self.plan.problems;
        let shared_budget = problems.iter().all(|p| p.budget == problems[0].budget);
        let mut rows = Vec::new();
        for (a, alg) in self.plan.algorithms.iter().enumerate() {
            let mut curves = Vec::new();
            for (p, problem) in problems.iter().enumerate() {
                let grid = eval_grid(problem.budget, ECDF_POINTS);
                let curve = ecdf_curve(self.records(a, p), &self.targets(p)?, &grid);
                rows.extend(grid.iter().zip(&curve).map(|(&eval, &attainment)| EcdfRow {
                    algorithm: alg.label.clone(),
                    problem: problem.label(),
                    eval,
                    attainment,
                }));
                curves.push(curve);
            }
            if shared_budget && problems.len() > 1 {
                let grid = eval_grid(problems[0].budget, ECDF_POINTS);
                rows.extend(grid.iter().zip(mean_curve(&curves)).map(|(&eval, attainment)| EcdfRow {
                    algorithm: alg.label.clone(),
                    problem: SUITE.to_string(),
                    eval,
                    attainment,
                }));
            }
        }
        Ok(rows)
    }

    /// Every unordered pair of algorithms on every problem.
    pub fn wilcoxon_rows(&self) -> Vec<WilcoxonRow> {
        let algs = &self.plan.algorithms;
        let mut rows = Vec::new();
        for (p, problem) in self.plan.problems.iter().enumerate() {
            for a in 0..algs.len() {
                for b in a + 1..algs.len() {
                    let r = wilcoxon_rank_sum(&self.finals(a, p), &self.finals(b, p), ALPHA);
                    rows.push(WilcoxonRow {
                        problem: problem.label(),
                        alg_a: algs[a].label.clone(),
                        alg_b: algs[b].label.clone(),
                        p: r.p_value,
                        verdict: r.verdict,
                    });
                }
            }
        }
        rows
    }

    pub fn lineage_rows(&self) -> Vec<LineageRow> {
        let mut rows = Vec::new();
        for (&(a, p), records) in &self.cells {
            for (trial, r) in records.iter().enumerate() {
                rows.push(LineageRow {
                    algorithm: self.plan.algorithms[a].label.clone(),
                    problem: self.plan.problems[p].label(),
                    trial,
                    fraction: r.failed_parent_fraction(),
                });
            }
        }
        rows
    }

    /// Writes `ecdf.csv`, `wilcoxon.csv`, `lineage.csv`, `targets.csv` and
    /// `analysis.json` into `dir`.
    pub fn write_reports(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_rows(&dir.join("targets.csv"), &self.target_rows()?)?;
        write_rows(&dir.join("ecdf.csv"), &self.ecdf_rows()?)?;
        write_rows(&dir.join("wilcoxon.csv"), &self.wilcoxon_rows())?;
        write_rows(&dir.join("lineage.csv"), &self.lineage_rows())?;
        let meta = AnalysisMeta {
            plan_hash: self.plan.hash(),
            quantile: "linear interpolation between order statistics (type 7)",
            ecdf_comparison: "best_so_far < target",
            ecdf_points: ECDF_POINTS,
            wilcoxon_exact_limit: EXACT_LIMIT,
            alpha: ALPHA,
        };
        fs::write(dir.join("analysis.json"), serde_json::to_vec_pretty(&meta)?)?;
        Ok(())
    }
}

pub(crate) fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
