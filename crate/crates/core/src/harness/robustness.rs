//! Budget-robustness comparison: LSHADE with a shortened reduction schedule
//! against the schedule-free USHADE(DPT).

use std::path::Path;

use serde::Serialize;

use super::plan::ExperimentPlan;
use super::report::{write_rows, ResultTable, ALPHA};
use crate::analysis::{median, wilcoxon_rank_sum, Verdict};
use crate::engines::EngineConfig;
use crate::error::{Error, Result};
use crate::record::RunRecord;
use crate::selection::SelectionPolicy;

/// Rates are reported per this many evaluations.
pub const RATE_UNIT: f64 = 10_000.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessRow {
    pub algorithm: String,
    pub problem: String,
    /// Median best-so-far decrease per 10^4 evaluations over `[B/4, B/2]`.
    pub pre_rate: f64,
    /// Same over `[B/2, B]`, after the half schedule has ended.
    pub post_rate: f64,
    /// `post_rate / pre_rate`; empty when `pre_rate` is 0.
    pub ratio: Option<f64>,
    pub median_final: f64,
    /// Wilcoxon p of this algorithm's finals against the half-schedule LSHADE.
    pub p_vs_half: Option<f64>,
    pub verdict_vs_half: Option<Verdict>,
}

/// Best-so-far decrease per 10^4 evaluations between `from` and `to`.
pub fn improvement_rate(record: &RunRecord, from: u64, to: u64) -> f64 {
    assert!(to > from);
    let (Some(a), Some(b)) = (record.best_at(from), record.best_at(to)) else {
        return 0.0;
    };
    (a - b) / (to - from) as f64 * RATE_UNIT
}

fn is_half_lshade(config: &EngineConfig, plan: &ExperimentPlan) -> bool {
    match config {
        EngineConfig::Lshade(c) => plan
            .problems
            .iter()
            .all(|p| c.target_for(p.budget) == (p.budget as f64 / 2.0).round() as u64),
        _ => false,
    }
}

fn is_ushade_dpt(config: &EngineConfig) -> bool {
    matches!(config, EngineConfig::Ushade(c) if c.selection.policy == SelectionPolicy::Dpt)
}

/// Indices of the half-schedule LSHADE and of USHADE(DPT) in the plan.
pub fn robustness_roles(plan: &ExperimentPlan) -> Result<(usize, usize)> {
    let half = plan
        .algorithms
        .iter()
        .position(|a| is_half_lshade(&a.config, plan))
        .ok_or_else(|| Error::Config("robustness needs an LSHADE whose schedule ends at budget/2".into()))?;
    let ushade = plan
        .algorithms
        .iter()
        .position(|a| is_ushade_dpt(&a.config))
        .ok_or_else(|| Error::Config("robustness needs USHADE with the DPT policy".into()))?;
    Ok((half, ushade))
}

/// One row per (algorithm, problem).
pub fn robustness_table(table: &ResultTable) -> Result<Vec<RobustnessRow>> {
    let plan = &table.plan;
    let (half, _) = robustness_roles(plan)?;
    let mut rows = Vec::new();
    for (a, alg) in plan.algorithms.iter().enumerate() {
        for (p, problem) in plan.problems.iter().enumerate() {
            let b = problem.budget;
            let records = table.records(a, p);
            if records.is_empty() {
                return Err(Error::InvalidInput(format!("no trials for {} on {}", alg.label, problem.label())));
            }
            let pre: Vec<f64> = records.iter().map(|r| improvement_rate(r, b / 4, b / 2)).collect();
            let post: Vec<f64> = records.iter().map(|r| improvement_rate(r, b / 2, b)).collect();
            let (pre_rate, post_rate) = (median(&pre), median(&post));
            let vs_half = (a != half).then(|| wilcoxon_rank_sum(&table.finals(a, p), &table.finals(half, p), ALPHA));
            rows.push(RobustnessRow {
                algorithm: alg.label.clone(),
                problem: problem.label(),
                pre_rate,
                post_rate,
                ratio: (pre_rate > 0.0).then(|| post_rate / pre_rate),
                median_final: median(&table.finals(a, p)),
                p_vs_half: vs_half.map(|w| w.p_value),
                verdict_vs_half: vs_half.map(|w| w.verdict),
            });
        }
    }
    Ok(rows)
}

pub fn write_robustness(rows: &[RobustnessRow], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rows(&dir.join("robustness.csv"), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::TrajectoryPoint;

    #[test]
    fn rate_over_window() {
        let mut r = RunRecord::new(0);
        r.trajectory = vec![
            TrajectoryPoint { evals: 1, best: 100.0 },
            TrajectoryPoint { evals: 25_000, best: 60.0 },
            TrajectoryPoint { evals: 50_000, best: 10.0 },
            TrajectoryPoint { evals: 100_000, best: 9.0 },
        ];
        assert_eq!(improvement_rate(&r, 25_000, 50_000), 20.0);
        assert_eq!(improvement_rate(&r, 50_000, 100_000), 0.2);
    }
}
