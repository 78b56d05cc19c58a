//! Post-processing of finished runs: ECDF attainment against pooled
//! quantile targets, pairwise Wilcoxon rank-sum tests and lineage fractions.

mod wilcoxon;

pub use wilcoxon::{wilcoxon_rank_sum, Verdict, WilcoxonMethod, WilcoxonResult, EXACT_LIMIT};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::RunRecord;

/// Linear-interpolation quantile between order statistics (type 7).
/// `sorted` must be ascending and non-empty.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&q));
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-problem attainment targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcdfTargets {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

impl EcdfTargets {
    pub fn as_array(&self) -> [f64; 3] {
        [self.q1, self.median, self.q3]
    }
}

/// Quartiles and median of the final fitness values of every compared
/// algorithm, pooled.
pub fn ecdf_targets(finals: &[f64]) -> Result<EcdfTargets> {
    if finals.is_empty() {
        return Err(Error::InvalidInput("no final values to derive targets from".into()));
    }
    if finals.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidInput("NaN among final values".into()));
    }
    let mut sorted = finals.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(EcdfTargets {
        q1: quantile_type7(&sorted, 0.25),
        median: quantile_type7(&sorted, 0.5),
        q3: quantile_type7(&sorted, 0.75),
    })
}

/// Fraction of runs whose best-so-far is strictly below `target` at each
/// grid point. Grid points past a run's end use its final value.
pub fn attainment(records: &[RunRecord], target: f64, grid: &[u64]) -> Vec<f64> {
    if records.is_empty() {
        return vec![0.0; grid.len()];
    }
    grid.iter()
        .map(|&e| {
            let hits = records
                .iter()
                .filter(|r| r.best_at(e).is_some_and(|b| b < target))
                .count();
            hits as f64 / records.len() as f64
        })
        .collect()
}

/// Attainment averaged over the three targets.
pub fn ecdf_curve(records: &[RunRecord], targets: &EcdfTargets, grid: &[u64]) -> Vec<f64> {
    let curves: Vec<Vec<f64>> = targets
        .as_array()
        .iter()
        .map(|&z| attainment(records, z, grid))
        .collect();
    mean_curve(&curves)
}

/// Pointwise mean of equally long curves, e.g. per-problem curves into a
/// suite curve.
pub fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let Some(first) = curves.first() else {
        return Vec::new();
    };
    assert!(curves.iter().all(|c| c.len() == first.len()), "curve length mismatch");
    (0..first.len())
        .map(|k| curves.iter().map(|c| c[k]).sum::<f64>() / curves.len() as f64)
        .collect()
}

/// `points` evenly spaced evaluation counts ending at `budget`.
pub fn eval_grid(budget: u64, points: usize) -> Vec<u64> {
    assert!(points > 0);
    let mut grid: Vec<u64> = (1..=points as u64)
        .map(|k| (budget * k).div_ceil(points as u64))
        .collect();
    grid.dedup();
    grid
}

/// Share of offspring best-so-far updates whose parent had failed; `None`
/// when the run never improved on its initial population.
pub fn failed_parent_fraction(record: &RunRecord) -> Option<f64> {
    record.failed_parent_fraction()
}

/// Median of a non-empty sample.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_type7(&sorted, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::TrajectoryPoint;
    use proptest::prelude::*;

    fn record(points: &[(u64, f64)]) -> RunRecord {
        let mut r = RunRecord::new(0);
        r.trajectory = points.iter().map(|&(evals, best)| TrajectoryPoint { evals, best }).collect();
        r.final_best = points.last().unwrap().1;
        r.evaluations = points.last().unwrap().0;
        r
    }

    #[test]
    fn targets_examples() {
        let t = ecdf_targets(&[9.0, 2.0, 5.0, 6.0]).unwrap();
        assert_eq!(t.median, 5.5);
        let t = ecdf_targets(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!((t.q1, t.median, t.q3), (1.75, 2.5, 3.25));
        let t = ecdf_targets(&[3.5; 7]).unwrap();
        assert_eq!((t.q1, t.median, t.q3), (3.5, 3.5, 3.5));
        assert!(ecdf_targets(&[]).is_err());
    }

    #[test]
    fn curve_examples() {
        let grid = [500, 1000, 2000];
        let never = record(&[(1, 50.0), (2000, 20.0)]);
        assert_eq!(attainment(&[never], 10.0, &grid), vec![0.0, 0.0, 0.0]);

        let crossing = record(&[(1, 50.0), (1000, 4.0)]);
        assert_eq!(attainment(&[crossing], 5.0, &grid), vec![0.0, 1.0, 1.0]);

        let recs: Vec<RunRecord> = [1.0, 2.0, 3.0, 9.0].iter().map(|&v| record(&[(1, v)])).collect();
        assert_eq!(attainment(&recs, 5.0, &[1]), vec![0.75]);
        // ties with the target do not count
        assert_eq!(attainment(&recs, 3.0, &[1]), vec![0.5]);
    }

    #[test]
    fn grid_past_budget_clamps() {
        let r = record(&[(1, 8.0), (100, 1.0)]);
        assert_eq!(attainment(&[r], 2.0, &[10_000]), vec![1.0]);
    }

    #[test]
    fn grid_shape() {
        assert_eq!(eval_grid(1000, 4), vec![250, 500, 750, 1000]);
        assert_eq!(eval_grid(3, 10), vec![1, 2, 3]);
    }

    proptest! {
        #[test]
        fn targets_ordered_permutation_invariant_and_scale_equivariant(
            mut v in proptest::collection::vec(0.0f64..1e6, 2..60),
            c in 0.001f64..1000.0,
            seed in any::<u64>(),
        ) {
            let t = ecdf_targets(&v).unwrap();
            prop_assert!(t.q1 <= t.median && t.median <= t.q3);
            let mut rng = crate::rng::RngStream::new(seed);
            for i in (1..v.len()).rev() {
                let j = rng.below(i + 1);
                v.swap(i, j);
            }
            prop_assert_eq!(ecdf_targets(&v).unwrap(), t);
            let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
            let ts = ecdf_targets(&scaled).unwrap();
            for (a, b) in ts.as_array().iter().zip(t.as_array()) {
                prop_assert!((a - c * b).abs() <= 1e-9 * (1.0 + (c * b).abs()));
            }
        }

        #[test]
        fn curve_is_non_decreasing(
            drops in proptest::collection::vec((1u64..500, 0.0f64..0.9), 1..30),
            target in 0.0f64..100.0,
        ) {
            let mut points = vec![(1u64, 100.0f64)];
            for (gap, factor) in drops {
                let (e, b) = *points.last().unwrap();
                points.push((e + gap, b * factor));
            }
            let r = record(&points);
            let grid: Vec<u64> = (0..100).map(|k| 1 + k * 150).collect();
            let curve = attainment(&[r], target, &grid);
            prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
